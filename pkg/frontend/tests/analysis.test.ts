import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { App } from '../src/app.js';
import { clusterColor } from '../src/colors.js';
import { FakeServer } from './helpers.js';

function makeApp(server: FakeServer): App {
  document.body.innerHTML = '<div id="app"></div>';
  return new App(document.getElementById('app')!, new ApiClient('', server.fetch));
}

function openAllPanels(): void {
  for (const details of document.querySelectorAll('#analysis-panels details')) {
    (details as HTMLDetailsElement).open = true;
    details.dispatchEvent(new Event('toggle'));
  }
}

async function uploadAndAnalyze(server: FakeServer): Promise<App> {
  const app = makeApp(server);
  await app.upload(new Blob(['csv bytes']));
  const button = document.querySelector(
    '.card.kind-OpenEnded button.analyze-button',
  ) as HTMLButtonElement;
  button.click();
  await vi.waitFor(() => expect(app.payload).not.toBeNull());
  return app;
}

describe('analysis view', () => {
  let server: FakeServer;

  beforeEach(() => {
    server = new FakeServer();
  });

  it('picking a question issues exactly one analyze call', async () => {
    await uploadAndAnalyze(server);
    expect(server.callsTo('/analyze')).toHaveLength(1);
    const body = server.callsTo('/analyze')[0].body as { question: string };
    expect(body.question).toBe('What is your favorite meal?');
  });

  it('renders all five panels', async () => {
    await uploadAndAnalyze(server);
    openAllPanels();
    const panels = document.querySelectorAll('#analysis-panels details.panel');
    expect(panels).toHaveLength(5);

    expect(document.querySelector('.summary-text')!.textContent).toContain('comfort food');
    expect(document.querySelector('canvas.scatter-canvas')).not.toBeNull();
    expect(document.querySelectorAll('.legend li').length).toBeGreaterThan(0);
    expect(document.querySelectorAll('.examples li')).toHaveLength(2);
    expect(document.querySelector('table.term-table')).not.toBeNull();
  });

  it('hover over a point reveals the full response text', async () => {
    const app = await uploadAndAnalyze(server);
    const scatter = app.analysisView.scatter;
    // Points project into a padded square; probe the screen position of the
    // first point via a sweep and assert the tooltip carries its exact text.
    const hit = scatter.handleHover(16, 560 - 16); // data (0,0) maps to bottom-left pad corner
    expect(hit).not.toBeNull();
    expect(hit!.text).toBe('pad thai with lime');
    expect(scatter.tooltip.hidden).toBe(false);
    expect(scatter.tooltip.textContent).toBe('pad thai with lime');
  });

  it('hover away hides the tooltip', async () => {
    const app = await uploadAndAnalyze(server);
    const scatter = app.analysisView.scatter;
    scatter.handleHover(16, 560 - 16);
    scatter.handleHover(300, 100); // empty region
    expect(scatter.tooltip.hidden).toBe(true);
  });

  it('legend and cluster-summary headers use the same color function', async () => {
    await uploadAndAnalyze(server);
    openAllPanels();
    const swatch = document.querySelector('.legend .swatch') as HTMLElement;
    const header = document.querySelector('#analysis-panels h4') as HTMLElement;
    expect(swatch.style.backgroundColor).toBe(header.style.color);
    expect(swatch.style.backgroundColor).not.toBe('');
    // and both equal the pure function of cluster id 0
    const probe = document.createElement('div');
    probe.style.color = clusterColor(0);
    expect(header.style.color).toBe(probe.style.color);
  });

  it('verified and unverified badges are rendered', async () => {
    await uploadAndAnalyze(server);
    openAllPanels();
    const badges = [...document.querySelectorAll('.examples .badge')].map(
      (b) => b.className,
    );
    expect(badges).toContain('badge verified');
    expect(badges).toContain('badge unverified');
  });

  it('"Pick again" issues exactly one reroll and does not re-render the scatter', async () => {
    const app = await uploadAndAnalyze(server);
    openAllPanels();
    const setPoints = vi.spyOn(app.analysisView.scatter, 'setPoints');
    const before = server.callsTo('/analyze').length;

    (document.getElementById('pick-again') as HTMLButtonElement).click();
    await vi.waitFor(() =>
      expect(document.querySelector('.examples li')!.textContent).toContain('fresh pick'),
    );

    expect(server.callsTo('/reroll')).toHaveLength(1);
    expect(server.callsTo('/analyze')).toHaveLength(before);
    expect(setPoints).not.toHaveBeenCalled();
  });

  it('a filter change issues exactly one analyze call', async () => {
    await uploadAndAnalyze(server);
    const before = server.callsTo('/analyze').length;
    const box = document.querySelector(
      '.filter-menu input[type=checkbox]',
    ) as HTMLInputElement;
    box.checked = true;
    box.dispatchEvent(new Event('change'));
    await vi.waitFor(() => expect(server.callsTo('/analyze')).toHaveLength(before + 1));

    const body = server.callsTo('/analyze').at(-1)!.body as {
      filter: Record<string, string[]>;
    };
    expect(body.filter).toEqual({ State: ['Massachusetts'] });
  });

  it('a grouping change issues exactly one analyze call', async () => {
    await uploadAndAnalyze(server);
    const before = server.callsTo('/analyze').length;
    const select = document.getElementById('grouping-select') as HTMLSelectElement;
    select.value = 'State';
    select.dispatchEvent(new Event('change'));
    await vi.waitFor(() => expect(server.callsTo('/analyze')).toHaveLength(before + 1));
    const body = server.callsTo('/analyze').at(-1)!.body as { grouping: string };
    expect(body.grouping).toBe('State');
  });

  it('a failed reroll shows an error in its panel without blanking others', async () => {
    const app = await uploadAndAnalyze(server);
    openAllPanels();
    server.rerollStatus = 409;

    await app.pickAgain();
    expect(
      app.analysisView.examplesPanel.body.querySelector('.panel-error')!.textContent,
    ).toContain('Reroll failed');
    expect(document.querySelector('.summary-text')!.textContent).toContain('comfort food');
  });
});
