/** Cluster colors: a pure function of cluster id, shared by the scatter,
 * the legend, and cluster-summary headers so they always agree. */

const PALETTE = [
  '#4e79a7', '#f28e2b', '#59a14f', '#e15759', '#b07aa1',
  '#76b7b2', '#edc948', '#ff9da7', '#9c755f', '#bab0ac',
  '#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd',
];

export const NOISE_COLOR = '#b4b4b4';

export function clusterColor(clusterId: number): string {
  if (clusterId < 0) return NOISE_COLOR;
  return PALETTE[clusterId % PALETTE.length];
}
