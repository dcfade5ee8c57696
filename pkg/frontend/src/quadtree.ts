/** Point quadtree for hover hit-testing over large scatters.
 *
 * Pure data structure (no DOM/canvas), so it stays unit-testable and the
 * renderer can query nearest-within-radius in screen coordinates.
 */

export interface IndexedPoint {
  x: number;
  y: number;
  index: number;
}

interface Node {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  points: IndexedPoint[]; // leaf payload
  children: Node[] | null;
}

const LEAF_CAPACITY = 8;
const MIN_EXTENT = 1e-9;

function makeNode(x0: number, y0: number, x1: number, y1: number): Node {
  return { x0, y0, x1, y1, points: [], children: null };
}

function split(node: Node): void {
  const mx = (node.x0 + node.x1) / 2;
  const my = (node.y0 + node.y1) / 2;
  node.children = [
    makeNode(node.x0, node.y0, mx, my),
    makeNode(mx, node.y0, node.x1, my),
    makeNode(node.x0, my, mx, node.y1),
    makeNode(mx, my, node.x1, node.y1),
  ];
  for (const p of node.points) insertInto(node, p);
  node.points = [];
}

function childFor(node: Node, p: IndexedPoint): Node {
  const mx = (node.x0 + node.x1) / 2;
  const my = (node.y0 + node.y1) / 2;
  const i = (p.x >= mx ? 1 : 0) + (p.y >= my ? 2 : 0);
  return node.children![i];
}

function insertInto(node: Node, p: IndexedPoint): void {
  let current = node;
  for (;;) {
    if (current.children !== null) {
      current = childFor(current, p);
      continue;
    }
    current.points.push(p);
    const tiny = current.x1 - current.x0 < MIN_EXTENT || current.y1 - current.y0 < MIN_EXTENT;
    if (current.points.length > LEAF_CAPACITY && !tiny) split(current);
    return;
  }
}

export class PointQuadtree {
  private root: Node | null = null;

  constructor(points: IndexedPoint[]) {
    if (!points.length) return;
    let x0 = Infinity, y0 = Infinity, x1 = -Infinity, y1 = -Infinity;
    for (const p of points) {
      x0 = Math.min(x0, p.x);
      y0 = Math.min(y0, p.y);
      x1 = Math.max(x1, p.x);
      y1 = Math.max(y1, p.y);
    }
    // Pad so max-edge points fall strictly inside.
    const pad = Math.max((x1 - x0) * 1e-6, (y1 - y0) * 1e-6, 1e-6);
    this.root = makeNode(x0 - pad, y0 - pad, x1 + pad, y1 + pad);
    for (const p of points) insertInto(this.root, p);
  }

  /** Nearest point within `radius` of (x, y), or null. */
  nearest(x: number, y: number, radius: number): IndexedPoint | null {
    if (!this.root) return null;
    let best: IndexedPoint | null = null;
    let bestDist = radius * radius;

    const visit = (node: Node): void => {
      // Prune nodes farther than the current best radius.
      const dx = x < node.x0 ? node.x0 - x : x > node.x1 ? x - node.x1 : 0;
      const dy = y < node.y0 ? node.y0 - y : y > node.y1 ? y - node.y1 : 0;
      if (dx * dx + dy * dy > bestDist) return;
      if (node.children !== null) {
        for (const child of node.children) visit(child);
        return;
      }
      for (const p of node.points) {
        const d = (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
        if (d <= bestDist) {
          bestDist = d;
          best = p;
        }
      }
    };

    visit(this.root);
    return best;
  }
}
