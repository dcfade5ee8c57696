/** The Summary tab: one card per column.  Open-ended cards show the
 * nonempty rate and are clickable to start an analysis; categorical cards
 * show the value distribution with a filter menu. */

import type { ColumnProfile, UploadResult } from './types.js';

const DISTRIBUTION_LIMIT = 8;

export class SummaryTab {
  readonly element: HTMLElement;
  readonly filters = new Map<string, Set<string>>();
  onQuestionPicked: ((question: string) => void) | null = null;
  onFiltersChanged: (() => void) | null = null;

  constructor() {
    this.element = document.createElement('div');
    this.element.id = 'summary-tab';
  }

  render(result: UploadResult): void {
    this.element.textContent = '';
    this.filters.clear();

    const info = document.createElement('p');
    info.className = 'muted';
    info.textContent = result.sampled
      ? `${result.analyzed_rows} of ${result.original_rows} rows sampled for analysis`
      : `${result.analyzed_rows} rows`;
    this.element.append(info);

    const hint = document.createElement('p');
    hint.textContent = 'Pick an open-ended question to analyze:';
    this.element.append(hint);

    const grid = document.createElement('div');
    grid.className = 'cards';
    for (const profile of result.profiles) {
      grid.append(this.card(profile));
    }
    this.element.append(grid);
  }

  selectedFilters(): Record<string, string[]> {
    const out: Record<string, string[]> = {};
    for (const [col, values] of this.filters) {
      if (values.size) out[col] = [...values].sort();
    }
    return out;
  }

  private card(profile: ColumnProfile): HTMLElement {
    const card = document.createElement('div');
    card.className = `card kind-${profile.kind}`;
    card.dataset.column = profile.name;
    card.dataset.kind = profile.kind;

    const title = document.createElement('h3');
    title.textContent = profile.name;
    const kind = document.createElement('p');
    kind.className = 'muted kind-line';
    kind.textContent = profile.kind === 'MultiSelectCategorical' ? 'multi-select' : profile.kind;
    card.append(title, kind);

    if (profile.kind === 'OpenEnded') {
      const rate = document.createElement('p');
      rate.className = 'nonempty-rate';
      rate.textContent = `${Math.round(profile.nonempty_rate * 100)}% answered`;
      const go = document.createElement('button');
      go.className = 'analyze-button';
      go.textContent = 'Analyze';
      go.addEventListener('click', () => this.onQuestionPicked?.(profile.name));
      card.append(rate, go);
      card.classList.add('clickable');
    } else if (profile.value_counts) {
      card.append(this.distribution(profile));
      card.append(this.filterMenu(profile));
    } else {
      const note = document.createElement('p');
      note.className = 'muted';
      note.textContent = `${profile.nonempty_count} answers`;
      card.append(note);
    }
    return card;
  }

  private distribution(profile: ColumnProfile): HTMLElement {
    const list = document.createElement('ul');
    list.className = 'distribution';
    const entries = Object.entries(profile.value_counts ?? {}).sort((a, b) => b[1] - a[1]);
    for (const [value, count] of entries.slice(0, DISTRIBUTION_LIMIT)) {
      const li = document.createElement('li');
      li.textContent = `${value}: ${count}`;
      list.append(li);
    }
    if (entries.length > DISTRIBUTION_LIMIT) {
      const li = document.createElement('li');
      li.className = 'muted';
      li.textContent = `… ${entries.length - DISTRIBUTION_LIMIT} more`;
      list.append(li);
    }
    return list;
  }

  private filterMenu(profile: ColumnProfile): HTMLElement {
    const details = document.createElement('details');
    details.className = 'filter-menu';
    const summary = document.createElement('summary');
    summary.textContent = 'Filter';
    details.append(summary);
    const entries = Object.entries(profile.value_counts ?? {}).sort((a, b) => b[1] - a[1]);
    for (const [value] of entries) {
      const label = document.createElement('label');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.value = value;
      box.dataset.column = profile.name;
      box.addEventListener('change', () => {
        const current = this.filters.get(profile.name) ?? new Set<string>();
        if (box.checked) current.add(value);
        else current.delete(value);
        this.filters.set(profile.name, current);
        this.onFiltersChanged?.();
      });
      label.append(box, ` ${value}`);
      details.append(label);
    }
    return details;
  }
}
