/** Test doubles: a recording fake of the analysis API served through the
 * fetch interface, plus payload builders shaped like the real service. */

import type { AnalysisPayload, ColumnProfile, UploadResult } from '../src/types.js';

export function profile(partial: Partial<ColumnProfile> & { name: string }): ColumnProfile {
  return {
    kind: 'OpenEnded',
    nonempty_count: 90,
    nonempty_rate: 0.9,
    distinct_count: 80,
    mean_chars: 60,
    value_counts: null,
    multi_select_delimiter: null,
    ...partial,
  };
}

export function fixtureUploadResult(): UploadResult {
  return {
    session_id: 'sess-1',
    sampled: false,
    original_rows: 100,
    analyzed_rows: 100,
    profiles: [
      profile({ name: 'What is your favorite meal?', kind: 'OpenEnded' }),
      profile({
        name: 'State',
        kind: 'Categorical',
        distinct_count: 2,
        mean_chars: 8,
        value_counts: { Massachusetts: 60, Vermont: 40 },
      }),
      profile({
        name: 'Contact channels',
        kind: 'MultiSelectCategorical',
        distinct_count: 5,
        mean_chars: 12,
        value_counts: { Email: 70, SMS: 30 },
        multi_select_delimiter: ';',
      }),
      profile({ name: 'Anything else?', kind: 'Other', nonempty_count: 2, nonempty_rate: 0.02 }),
    ],
  };
}

export function samplePayload(overrides: Partial<AnalysisPayload> = {}): AnalysisPayload {
  return {
    question: 'What is your favorite meal?',
    seed: 0,
    grouping: 'auto',
    response_count: 3,
    summary: {
      text: 'People like warm comfort food.',
      prompt: { sampled_row_ids: [0, 1, 2], body: '', instruction: 'q', seed: 0 },
      provider_id: 'stub',
      fallback_used: false,
    },
    scatter: {
      points: [
        { row_id: 0, x: 0.0, y: 0.0, cluster: 0, text: 'pad thai with lime' },
        { row_id: 1, x: 1.0, y: 1.0, cluster: 0, text: 'green curry rice' },
        { row_id: 2, x: 4.0, y: 4.0, cluster: -1, text: 'sandwiches' },
      ],
      params: { n_neighbors: 15 },
    },
    clustering: {
      source: { kind: 'auto', column: null },
      cluster_names: ['0'],
      sizes: [2],
      noise_count: 1,
    },
    cluster_labels: [{ cluster_id: 0, top_terms: ['thai', 'curry'], size: 2 }],
    cluster_summaries: {
      '0': {
        text: 'Thai dishes dominate.',
        prompt: { sampled_row_ids: [0, 1], body: '', instruction: 'q', seed: 1 },
        provider_id: 'stub',
        fallback_used: false,
      },
    },
    interesting_examples: {
      items: [
        { quoted_text: 'pad thai with lime', rationale: 'vivid', verified: true, matched_row_id: 0 },
        { quoted_text: 'moon cheese', rationale: 'odd', verified: false, matched_row_id: null },
      ],
      sampled_row_ids: [0, 1, 2],
      seed: 0,
      provider_id: 'stub',
    },
    term_table: {
      terms: [
        { surface: 'thai', tokens: ['thai'], doc_count: 2 },
        { surface: 'curry', tokens: ['curry'], doc_count: 1 },
      ],
      groups: ['0', '∅'],
      group_sizes: [2, 1],
      counts: [
        [2, 0],
        [1, 0],
      ],
      pmi: [
        [0.3, -1.2],
        [0.2, -0.7],
      ],
    },
    unplotted_row_ids: [],
    ...overrides,
  };
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

/** fetch-compatible fake that scripts responses per endpoint suffix. */
export class FakeServer {
  calls: RecordedCall[] = [];
  uploadResult: UploadResult = fixtureUploadResult();
  payload: AnalysisPayload = samplePayload();
  uploadStatus = 200;
  uploadErrorDetail = '';
  rerollStatus = 200;

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? 'GET';
    let body: unknown = null;
    if (typeof init?.body === 'string') body = JSON.parse(init.body);
    this.calls.push({ url, method, body });

    if (url.endsWith('/surveys')) {
      if (this.uploadStatus !== 200) {
        return json({ detail: this.uploadErrorDetail }, this.uploadStatus);
      }
      return json(this.uploadResult);
    }
    if (url.includes('/examples/reroll')) {
      if (this.rerollStatus !== 200) {
        return json({ detail: 'no analysis to reroll' }, this.rerollStatus);
      }
      const seed = (body as { seed: number }).seed;
      const examples = {
        ...this.payload.interesting_examples,
        seed,
        items: [
          {
            quoted_text: `fresh pick ${seed}`,
            rationale: 'rerolled',
            verified: false,
            matched_row_id: null,
          },
        ],
      };
      return json({ interesting_examples: examples });
    }
    if (url.includes('/analyze')) {
      const request = body as { question: string; grouping: string };
      return json({ ...this.payload, question: request.question, grouping: request.grouping });
    }
    return json({ detail: 'not found' }, 404);
  };

  callsTo(suffix: string): RecordedCall[] {
    return this.calls.filter((c) => c.url.includes(suffix));
  }
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}
