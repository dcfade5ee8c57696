/** Canvas topic map: cluster-colored points, quadtree hover with a tooltip
 * showing the full response text, and wheel-zoom / drag-pan.
 *
 * Drawing is skipped when no 2D context exists (headless DOM); hit-testing
 * and tooltip logic still work, driven by screen coordinates.
 */

import { clusterColor } from './colors.js';
import { PointQuadtree } from './quadtree.js';
import type { ScatterPoint } from './types.js';

const POINT_RADIUS = 3;
const HOVER_RADIUS = 8;
const NOISE_ALPHA = 0.35;

export class Scatterplot {
  readonly canvas: HTMLCanvasElement;
  readonly tooltip: HTMLDivElement;
  private ctx: CanvasRenderingContext2D | null;
  private points: ScatterPoint[] = [];
  private tree: PointQuadtree = new PointQuadtree([]);
  private screen: { x: number; y: number }[] = [];
  // view transform: data -> screen
  private scale = 1;
  private offsetX = 0;
  private offsetY = 0;
  private dragging: { startX: number; startY: number } | null = null;
  hovered: ScatterPoint | null = null;

  constructor(private container: HTMLElement, private size = 560) {
    this.canvas = document.createElement('canvas');
    this.canvas.width = size;
    this.canvas.height = size;
    this.canvas.className = 'scatter-canvas';
    this.tooltip = document.createElement('div');
    this.tooltip.className = 'scatter-tooltip';
    this.tooltip.hidden = true;
    container.append(this.canvas, this.tooltip);
    this.ctx = this.canvas.getContext ? this.canvas.getContext('2d') : null;

    this.canvas.addEventListener('pointermove', (ev) => {
      if (this.dragging) {
        this.offsetX += ev.offsetX - this.dragging.startX;
        this.offsetY += ev.offsetY - this.dragging.startY;
        this.dragging = { startX: ev.offsetX, startY: ev.offsetY };
        this.project();
        this.draw();
        return;
      }
      this.handleHover(ev.offsetX, ev.offsetY);
    });
    this.canvas.addEventListener('pointerdown', (ev) => {
      this.dragging = { startX: ev.offsetX, startY: ev.offsetY };
    });
    this.canvas.addEventListener('pointerup', () => (this.dragging = null));
    this.canvas.addEventListener('pointerleave', () => {
      this.dragging = null;
      this.hideTooltip();
    });
    this.canvas.addEventListener('wheel', (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY < 0 ? 1.2 : 1 / 1.2;
      this.zoomAt(ev.offsetX, ev.offsetY, factor);
    });
  }

  setPoints(points: ScatterPoint[]): void {
    this.points = points;
    this.resetView();
  }

  private resetView(): void {
    this.scale = 1;
    this.offsetX = 0;
    this.offsetY = 0;
    this.project();
    this.draw();
  }

  /** Recompute screen coordinates and rebuild the hit-test index. */
  private project(): void {
    const n = this.points.length;
    this.screen = new Array(n);
    if (!n) {
      this.tree = new PointQuadtree([]);
      return;
    }
    let x0 = Infinity, y0 = Infinity, x1 = -Infinity, y1 = -Infinity;
    for (const p of this.points) {
      x0 = Math.min(x0, p.x);
      y0 = Math.min(y0, p.y);
      x1 = Math.max(x1, p.x);
      y1 = Math.max(y1, p.y);
    }
    const spanX = x1 - x0 || 1;
    const spanY = y1 - y0 || 1;
    const pad = 16;
    const inner = this.size - 2 * pad;
    for (let i = 0; i < n; i++) {
      const p = this.points[i];
      const sx = pad + ((p.x - x0) / spanX) * inner;
      const sy = pad + (1 - (p.y - y0) / spanY) * inner;
      this.screen[i] = {
        x: sx * this.scale + this.offsetX,
        y: sy * this.scale + this.offsetY,
      };
    }
    this.tree = new PointQuadtree(
      this.screen.map((s, index) => ({ x: s.x, y: s.y, index })),
    );
  }

  private zoomAt(cx: number, cy: number, factor: number): void {
    this.scale *= factor;
    this.offsetX = cx - (cx - this.offsetX) * factor;
    this.offsetY = cy - (cy - this.offsetY) * factor;
    this.project();
    this.draw();
  }

  draw(): void {
    if (!this.ctx) return;
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.size, this.size);
    for (let i = 0; i < this.points.length; i++) {
      const p = this.points[i];
      const s = this.screen[i];
      ctx.globalAlpha = p.cluster < 0 ? NOISE_ALPHA : 0.85;
      ctx.fillStyle = clusterColor(p.cluster);
      ctx.beginPath();
      ctx.arc(s.x, s.y, POINT_RADIUS, 0, Math.PI * 2);
      ctx.fill();
    }
    ctx.globalAlpha = 1;
  }

  /** Hover hit-test in screen coordinates; exposed for tests. */
  handleHover(x: number, y: number): ScatterPoint | null {
    const hit = this.tree.nearest(x, y, HOVER_RADIUS);
    if (!hit) {
      this.hideTooltip();
      return null;
    }
    const point = this.points[hit.index];
    this.hovered = point;
    this.tooltip.hidden = false;
    this.tooltip.textContent = point.text;
    this.tooltip.style.left = `${hit.x + 12}px`;
    this.tooltip.style.top = `${hit.y + 12}px`;
    return point;
  }

  hideTooltip(): void {
    this.hovered = null;
    this.tooltip.hidden = true;
  }
}
