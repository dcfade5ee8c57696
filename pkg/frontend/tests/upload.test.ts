import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { App } from '../src/app.js';
import { FakeServer } from './helpers.js';

function makeApp(server: FakeServer): App {
  document.body.innerHTML = '<div id="app"></div>';
  return new App(document.getElementById('app')!, new ApiClient('', server.fetch));
}

describe('upload flow', () => {
  let server: FakeServer;
  let app: App;

  beforeEach(() => {
    server = new FakeServer();
    app = makeApp(server);
  });

  it('renders per-column cards with correct kinds after upload', async () => {
    await app.upload(new Blob(['csv bytes']));
    const cards = [...document.querySelectorAll('.card')];
    expect(cards).toHaveLength(4);
    const kinds = Object.fromEntries(
      cards.map((c) => [(c as HTMLElement).dataset.column, (c as HTMLElement).dataset.kind]),
    );
    expect(kinds['What is your favorite meal?']).toBe('OpenEnded');
    expect(kinds['State']).toBe('Categorical');
    expect(kinds['Contact channels']).toBe('MultiSelectCategorical');
    expect(kinds['Anything else?']).toBe('Other');
  });

  it('open-ended card shows the nonempty rate and is clickable', async () => {
    await app.upload(new Blob(['csv bytes']));
    const card = document.querySelector('.card.kind-OpenEnded')!;
    expect(card.querySelector('.nonempty-rate')!.textContent).toBe('90% answered');
    expect(card.querySelector('button.analyze-button')).not.toBeNull();
  });

  it('categorical card shows the value distribution and a filter menu', async () => {
    await app.upload(new Blob(['csv bytes']));
    const card = [...document.querySelectorAll('.card')].find(
      (c) => (c as HTMLElement).dataset.column === 'State',
    )!;
    const items = [...card.querySelectorAll('.distribution li')].map((li) => li.textContent);
    expect(items).toContain('Massachusetts: 60');
    expect(card.querySelectorAll('.filter-menu input[type=checkbox]')).toHaveLength(2);
  });

  it('surfaces 413 inline', async () => {
    server.uploadStatus = 413;
    server.uploadErrorDetail = 'upload exceeds size limit';
    await app.upload(new Blob(['way too big']));
    expect(document.getElementById('upload-error')!.textContent).toContain(
      'upload exceeds size limit',
    );
    expect(document.querySelectorAll('.card')).toHaveLength(0);
  });

  it('surfaces 400 inline', async () => {
    server.uploadStatus = 400;
    server.uploadErrorDetail = 'EmptyInput: no bytes';
    await app.upload(new Blob(['']));
    expect(document.getElementById('upload-error')!.textContent).toContain('EmptyInput');
  });
});
