/** Sortable term-by-category table.  Group columns sort by PMI (the
 * association score), the term/responses columns by name and doc count;
 * clicking a header again flips the direction. */

import type { TermTablePayload } from './types.js';

type SortKey = { kind: 'term' } | { kind: 'doc_count' } | { kind: 'group'; index: number };

export class TermTableView {
  readonly element: HTMLTableElement;
  private data: TermTablePayload | null = null;
  private key: SortKey = { kind: 'doc_count' };
  private descending = true;

  constructor(private maxRows = 30) {
    this.element = document.createElement('table');
    this.element.className = 'term-table';
  }

  setData(data: TermTablePayload): void {
    this.data = data;
    this.key = { kind: 'doc_count' };
    this.descending = true;
    this.render();
  }

  sortBy(key: SortKey): void {
    if (JSON.stringify(key) === JSON.stringify(this.key)) {
      this.descending = !this.descending;
    } else {
      this.key = key;
      this.descending = true;
    }
    this.render();
  }

  private order(): number[] {
    const data = this.data!;
    const indices = data.terms.map((_, i) => i);
    const key = this.key;
    const value = (i: number): number | string => {
      if (key.kind === 'term') return data.terms[i].surface;
      if (key.kind === 'doc_count') return data.terms[i].doc_count;
      return data.pmi[i][key.index];
    };
    indices.sort((a, b) => {
      const va = value(a);
      const vb = value(b);
      const cmp = va < vb ? -1 : va > vb ? 1 : a - b;
      return this.descending ? -cmp : cmp;
    });
    return indices;
  }

  private render(): void {
    const data = this.data;
    this.element.textContent = '';
    if (!data) return;

    const thead = document.createElement('thead');
    const row = document.createElement('tr');
    const addHeader = (label: string, key: SortKey) => {
      const th = document.createElement('th');
      th.textContent = label;
      th.tabIndex = 0;
      th.classList.toggle('sorted', JSON.stringify(key) === JSON.stringify(this.key));
      th.addEventListener('click', () => this.sortBy(key));
      row.append(th);
    };
    addHeader('term', { kind: 'term' });
    addHeader('responses', { kind: 'doc_count' });
    data.groups.forEach((g, i) => addHeader(g, { kind: 'group', index: i }));
    thead.append(row);

    const tbody = document.createElement('tbody');
    for (const i of this.order().slice(0, this.maxRows)) {
      const tr = document.createElement('tr');
      const term = document.createElement('td');
      term.textContent = data.terms[i].surface;
      const count = document.createElement('td');
      count.textContent = String(data.terms[i].doc_count);
      tr.append(term, count);
      data.groups.forEach((_, gi) => {
        const td = document.createElement('td');
        td.textContent = `${data.counts[i][gi]} (${data.pmi[i][gi] >= 0 ? '+' : ''}${data.pmi[i][gi].toFixed(2)})`;
        tr.append(td);
      });
      tbody.append(tr);
    }
    this.element.append(thead, tbody);
  }
}
