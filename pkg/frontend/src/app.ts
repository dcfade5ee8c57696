/** Single-page client: Welcome (upload) -> Summary (schema + filters) ->
 * Analysis (panels).  All analytics come from the API; the client only
 * renders.  Stale in-flight responses are discarded by sequence number, and
 * each filter or grouping change issues exactly one analyze call. */

import { ApiClient, ApiError, LatestOnly } from './api.js';
import { AnalysisView } from './analysisTab.js';
import { SummaryTab } from './summaryTab.js';
import type { AnalysisPayload, UploadResult } from './types.js';

export class App {
  readonly root: HTMLElement;
  readonly api: ApiClient;
  readonly summaryTab = new SummaryTab();
  readonly analysisView = new AnalysisView();
  private readonly analyzeGate = new LatestOnly();

  sessionId: string | null = null;
  uploadResult: UploadResult | null = null;
  question: string | null = null;
  grouping = 'auto';
  seed = 0;
  payload: AnalysisPayload | null = null;
  private nextRerollSeed = 1001;

  private welcomeSection!: HTMLElement;
  private summarySection!: HTMLElement;
  private analysisSection!: HTMLElement;
  private uploadError!: HTMLElement;
  private analysisError!: HTMLElement;
  private groupingSelect!: HTMLSelectElement;
  private questionHeading!: HTMLElement;

  constructor(root: HTMLElement, api?: ApiClient) {
    this.root = root;
    this.api = api ?? new ApiClient('');
    this.buildSkeleton();
  }

  private buildSkeleton(): void {
    this.root.textContent = '';

    this.welcomeSection = section('welcome', 'Welcome');
    const intro = document.createElement('p');
    intro.textContent =
      'Upload a CSV or JSONL survey export to explore the open-ended answers.';
    const input = document.createElement('input');
    input.type = 'file';
    input.id = 'file-input';
    input.accept = '.csv,.jsonl,.ndjson,.json';
    const button = document.createElement('button');
    button.id = 'upload-button';
    button.textContent = 'Upload';
    button.addEventListener('click', () => {
      const file = input.files?.[0];
      if (file) void this.upload(file);
    });
    this.uploadError = document.createElement('p');
    this.uploadError.className = 'error';
    this.uploadError.id = 'upload-error';
    this.welcomeSection.append(intro, input, button, this.uploadError);

    this.summarySection = section('summary', 'Summary');
    this.summarySection.hidden = true;
    this.summarySection.append(this.summaryTab.element);

    this.analysisSection = section('analysis', 'Analysis');
    this.analysisSection.hidden = true;
    this.questionHeading = document.createElement('h3');
    this.questionHeading.id = 'question-heading';
    const groupingLabel = document.createElement('label');
    groupingLabel.textContent = 'Group points by ';
    this.groupingSelect = document.createElement('select');
    this.groupingSelect.id = 'grouping-select';
    this.groupingSelect.addEventListener('change', () => {
      this.grouping = this.groupingSelect.value;
      void this.runAnalysis();
    });
    groupingLabel.append(this.groupingSelect);
    this.analysisError = document.createElement('p');
    this.analysisError.className = 'error';
    this.analysisError.id = 'analysis-error';
    this.analysisSection.append(
      this.questionHeading,
      groupingLabel,
      this.analysisError,
      this.analysisView.element,
    );

    this.root.append(this.welcomeSection, this.summarySection, this.analysisSection);

    this.summaryTab.onQuestionPicked = (question) => {
      this.question = question;
      void this.runAnalysis();
    };
    this.summaryTab.onFiltersChanged = () => {
      if (this.question) void this.runAnalysis();
    };
    this.analysisView.onPickAgain = () => void this.pickAgain();
  }

  async upload(file: File | Blob): Promise<void> {
    this.uploadError.textContent = '';
    try {
      const result = await this.api.upload(file, (file as File).name ?? 'survey.csv');
      this.sessionId = result.session_id;
      this.uploadResult = result;
      this.summaryTab.render(result);
      this.summarySection.hidden = false;
      this.populateGroupingOptions(result);
    } catch (err) {
      this.uploadError.textContent =
        err instanceof ApiError ? `Upload failed: ${err.message}` : `Upload failed: ${err}`;
    }
  }

  private populateGroupingOptions(result: UploadResult): void {
    this.groupingSelect.textContent = '';
    const auto = document.createElement('option');
    auto.value = 'auto';
    auto.textContent = 'response text (auto-clusters)';
    this.groupingSelect.append(auto);
    for (const profile of result.profiles) {
      if (profile.kind === 'Categorical' || profile.kind === 'MultiSelectCategorical') {
        const opt = document.createElement('option');
        opt.value = profile.name;
        opt.textContent = profile.name;
        this.groupingSelect.append(opt);
      }
    }
    this.groupingSelect.value = 'auto';
    this.grouping = 'auto';
  }

  /** One analyze call per invocation; stale responses are dropped. */
  async runAnalysis(): Promise<void> {
    if (!this.sessionId || !this.question) return;
    this.analysisSection.hidden = false;
    this.questionHeading.textContent = this.question;
    this.analysisError.textContent = '';
    this.analysisView.setPending(true);
    try {
      const payload = await this.analyzeGate.run(() =>
        this.api.analyze(this.sessionId!, {
          question: this.question!,
          filter: this.summaryTab.selectedFilters(),
          grouping: this.grouping,
          seed: this.seed,
        }),
      );
      if (payload === undefined) return; // superseded by a newer request
      this.payload = payload;
      this.analysisView.update(payload);
    } catch (err) {
      this.analysisError.textContent =
        err instanceof ApiError ? `Analysis failed: ${err.message}` : `Analysis failed: ${err}`;
    } finally {
      this.analysisView.setPending(false);
    }
  }

  /** Reroll only the examples panel; the scatter and summaries stay put. */
  async pickAgain(): Promise<void> {
    if (!this.sessionId) return;
    this.analysisView.examplesPanel.setPending(true);
    try {
      const examples = await this.api.reroll(this.sessionId, this.nextRerollSeed++);
      this.analysisView.renderExamples(examples);
    } catch (err) {
      this.analysisView.examplesPanel.setError(
        err instanceof ApiError ? `Reroll failed: ${err.message}` : `Reroll failed: ${err}`,
      );
    } finally {
      this.analysisView.examplesPanel.setPending(false);
    }
  }
}

function section(id: string, title: string): HTMLElement {
  const el = document.createElement('section');
  el.id = `${id}-section`;
  const h = document.createElement('h2');
  h.textContent = title;
  el.append(h);
  return el;
}

export function boot(): App {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');
  return new App(root);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot();
}
