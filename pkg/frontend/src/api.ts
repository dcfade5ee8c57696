/** Thin typed client over the analysis API, plus a latest-wins guard that
 * discards responses superseded by a newer request. */

import type { AnalysisPayload, AnalyzeRequest, ExamplesPayload, UploadResult } from './types.js';

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readError(resp: Response): Promise<ApiError> {
  let detail = `${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  return new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async upload(file: File | Blob, name = 'survey.csv'): Promise<UploadResult> {
    const form = new FormData();
    form.append('file', file, name);
    const resp = await this.fetchFn(`${this.baseUrl}/surveys`, { method: 'POST', body: form });
    if (!resp.ok) throw await readError(resp);
    return resp.json();
  }

  async analyze(sessionId: string, request: AnalyzeRequest): Promise<AnalysisPayload> {
    const resp = await this.fetchFn(`${this.baseUrl}/surveys/${sessionId}/analyze`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
    if (!resp.ok) throw await readError(resp);
    return resp.json();
  }

  async reroll(sessionId: string, seed: number): Promise<ExamplesPayload> {
    const resp = await this.fetchFn(`${this.baseUrl}/surveys/${sessionId}/examples/reroll`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ seed }),
    });
    if (!resp.ok) throw await readError(resp);
    const body = await resp.json();
    return body.interesting_examples;
  }
}

/** Serializes async results per key: only the newest request's result is
 * delivered, older in-flight responses resolve to undefined. */
export class LatestOnly {
  private seq = 0;

  async run<T>(task: () => Promise<T>): Promise<T | undefined> {
    const ticket = ++this.seq;
    const result = await task();
    return ticket === this.seq ? result : undefined;
  }

  get current(): number {
    return this.seq;
  }
}
