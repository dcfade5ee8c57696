/** The analysis tab: five collapsible panels in tab order — top-level
 * summary, topic scatterplot, interesting examples, cluster summaries, and
 * the term-by-category table. */

import { clusterColor } from './colors.js';
import { Panel } from './panels.js';
import { Scatterplot } from './scatterplot.js';
import { TermTableView } from './termTable.js';
import type { AnalysisPayload, ExamplesPayload } from './types.js';

export class AnalysisView {
  readonly element: HTMLElement;
  readonly summaryPanel = new Panel('Summary', true);
  readonly scatterPanel = new Panel('Response map', true);
  readonly examplesPanel = new Panel('Interesting examples', false);
  readonly clustersPanel = new Panel('Cluster summaries', false);
  readonly termsPanel = new Panel('Top words and phrases', false);
  readonly scatter: Scatterplot;
  readonly termTable = new TermTableView();
  onPickAgain: (() => void) | null = null;

  constructor() {
    this.element = document.createElement('div');
    this.element.id = 'analysis-panels';
    const scatterBox = document.createElement('div');
    scatterBox.className = 'scatter-box';
    this.scatter = new Scatterplot(scatterBox);
    this.element.append(
      this.summaryPanel.element,
      this.scatterPanel.element,
      this.examplesPanel.element,
      this.clustersPanel.element,
      this.termsPanel.element,
    );
    this.scatterBox = scatterBox;
  }

  private scatterBox: HTMLElement;

  setPending(pending: boolean): void {
    for (const p of [
      this.summaryPanel,
      this.scatterPanel,
      this.examplesPanel,
      this.clustersPanel,
      this.termsPanel,
    ]) {
      p.setPending(pending);
    }
  }

  update(payload: AnalysisPayload): void {
    this.summaryPanel.setContent(() => {
      const p = document.createElement('p');
      p.className = 'summary-text';
      p.textContent = payload.summary.text;
      const meta = document.createElement('p');
      meta.className = 'muted';
      meta.textContent = payload.summary.fallback_used
        ? 'extractive fallback (no language model configured)'
        : `from ${payload.summary.prompt.sampled_row_ids.length} sampled responses`;
      this.summaryPanel.body.append(p, meta);
    });

    this.scatterPanel.setContent(() => {
      this.scatterPanel.body.append(this.scatterBox);
      this.scatter.setPoints(payload.scatter.points);
      const legend = document.createElement('ul');
      legend.className = 'legend';
      for (const label of payload.cluster_labels) {
        const li = document.createElement('li');
        const swatch = document.createElement('span');
        swatch.className = 'swatch';
        swatch.style.backgroundColor = clusterColor(label.cluster_id);
        const name = payload.clustering.cluster_names[label.cluster_id] ?? String(label.cluster_id);
        li.append(
          swatch,
          ` ${name} (${label.size}): ${label.top_terms.join(', ') || '(no terms)'}`,
        );
        legend.append(li);
      }
      if (payload.clustering.noise_count > 0) {
        const li = document.createElement('li');
        li.className = 'muted';
        li.textContent = `unclustered: ${payload.clustering.noise_count}`;
        legend.append(li);
      }
      if (payload.unplotted_row_ids.length > 0) {
        const li = document.createElement('li');
        li.className = 'muted';
        li.textContent = `unplotted: ${payload.unplotted_row_ids.length}`;
        legend.append(li);
      }
      this.scatterPanel.body.append(legend);
    });

    this.renderExamples(payload.interesting_examples);

    this.clustersPanel.setContent(() => {
      const list = document.createElement('div');
      for (const [cid, summary] of Object.entries(payload.cluster_summaries)) {
        const head = document.createElement('h4');
        head.style.color = clusterColor(Number(cid));
        const name = payload.clustering.cluster_names[Number(cid)] ?? cid;
        head.textContent = `${name} (${payload.clustering.sizes[Number(cid)] ?? '?'})`;
        const body = document.createElement('p');
        body.textContent = summary.text;
        list.append(head, body);
      }
      this.clustersPanel.body.append(list);
    });

    this.termsPanel.setContent(() => {
      this.termTable.setData(payload.term_table);
      this.termsPanel.body.append(this.termTable.element);
    });
  }

  renderExamples(examples: ExamplesPayload): void {
    this.examplesPanel.setContent(() => {
      const list = document.createElement('ul');
      list.className = 'examples';
      if (!examples.items.length) {
        const li = document.createElement('li');
        li.className = 'muted';
        li.textContent = '(no examples; configure a language model provider)';
        list.append(li);
      }
      for (const ex of examples.items) {
        const li = document.createElement('li');
        const badge = document.createElement('span');
        badge.className = ex.verified ? 'badge verified' : 'badge unverified';
        badge.textContent = ex.verified ? 'verified' : 'unverified';
        badge.title = ex.verified
          ? `matches sampled response ${ex.matched_row_id}`
          : 'quote not found in the sampled responses';
        const quote = document.createElement('blockquote');
        quote.textContent = `“${ex.quoted_text}”`;
        const why = document.createElement('p');
        why.textContent = ex.rationale;
        li.append(badge, quote, why);
        list.append(li);
      }
      const button = document.createElement('button');
      button.id = 'pick-again';
      button.textContent = 'Pick again';
      button.addEventListener('click', () => this.onPickAgain?.());
      this.examplesPanel.body.append(list, button);
    });
  }
}
