import { describe, expect, it } from 'vitest';

import { NOISE_COLOR, clusterColor } from '../src/colors.js';

describe('clusterColor', () => {
  it('is a pure function of cluster id', () => {
    for (let id = -1; id < 40; id++) {
      expect(clusterColor(id)).toBe(clusterColor(id));
    }
  });

  it('maps noise to gray', () => {
    expect(clusterColor(-1)).toBe(NOISE_COLOR);
  });

  it('gives adjacent clusters distinct colors', () => {
    const seen = new Set<string>();
    for (let id = 0; id < 10; id++) seen.add(clusterColor(id));
    expect(seen.size).toBe(10);
  });
});
