/** Shapes of the JSON the analysis API returns; the client renders these
 * verbatim and never recomputes analytics. */

export interface ColumnProfile {
  name: string;
  kind: 'OpenEnded' | 'Categorical' | 'MultiSelectCategorical' | 'Other';
  nonempty_count: number;
  nonempty_rate: number;
  distinct_count: number;
  mean_chars: number;
  value_counts: Record<string, number> | null;
  multi_select_delimiter: string | null;
}

export interface UploadResult {
  session_id: string;
  profiles: ColumnProfile[];
  sampled: boolean;
  original_rows: number;
  analyzed_rows: number;
}

export interface PromptInfo {
  sampled_row_ids: number[];
  body: string;
  instruction: string;
  seed: number;
}

export interface SummaryResult {
  text: string;
  prompt: PromptInfo;
  provider_id: string;
  fallback_used: boolean;
}

export interface ScatterPoint {
  row_id: number;
  x: number;
  y: number;
  cluster: number;
  text: string;
}

export interface ClusterLabel {
  cluster_id: number;
  top_terms: string[];
  size: number;
}

export interface InterestingExample {
  quoted_text: string;
  rationale: string;
  verified: boolean;
  matched_row_id: number | null;
}

export interface ExamplesPayload {
  items: InterestingExample[];
  sampled_row_ids: number[];
  seed: number;
  provider_id: string;
}

export interface TermTablePayload {
  terms: { surface: string; tokens: string[]; doc_count: number }[];
  groups: string[];
  group_sizes: number[];
  counts: number[][];
  pmi: number[][];
}

export interface AnalysisPayload {
  question: string;
  seed: number;
  grouping: string;
  response_count: number;
  summary: SummaryResult;
  scatter: { points: ScatterPoint[]; labels?: ClusterLabel[]; params: Record<string, number> };
  clustering: {
    source: { kind: 'auto' | 'category'; column: string | null };
    cluster_names: string[];
    sizes: number[];
    noise_count: number;
  };
  cluster_labels: ClusterLabel[];
  cluster_summaries: Record<string, SummaryResult>;
  interesting_examples: ExamplesPayload;
  term_table: TermTablePayload;
  unplotted_row_ids: number[];
}

export interface AnalyzeRequest {
  question: string;
  filter: Record<string, string[]>;
  grouping: string;
  seed: number;
}
