/** Deterministic force-directed layout for the abstract cover graph. */

import type { GraphDoc } from "./api.js";

export interface Point {
  x: number;
  y: number;
}

/** Mulberry32: small seeded PRNG so layouts are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
  seed?: number;
}

/**
 * Fruchterman-Reingold style layout: springs along edges, repulsion between
 * all vertex pairs, cooling step cap, positions finally rescaled to fit the
 * viewport with a margin. Same graph + seed always gives the same result.
 */
export function forceLayout(
  graph: GraphDoc,
  options: LayoutOptions = {},
): Map<number, Point> {
  const { width = 800, height = 600, iterations = 300, seed = 1 } = options;
  const ids = graph.vertices.map((v) => v.id);
  const n = ids.length;
  const positions = new Map<number, Point>();
  if (n === 0) return positions;

  const rand = mulberry32(seed);
  const pos = ids.map(() => ({
    x: (rand() - 0.5) * width,
    y: (rand() - 0.5) * height,
  }));
  if (n === 1) {
    positions.set(ids[0], { x: width / 2, y: height / 2 });
    return positions;
  }

  const index = new Map(ids.map((id, i) => [id, i]));
  const edges = graph.edges.map((e) => ({
    a: index.get(e.source)!,
    b: index.get(e.target)!,
  }));
  const k = Math.sqrt((width * height) / n);

  for (let iter = 0; iter < iterations; iter++) {
    const disp = pos.map(() => ({ x: 0, y: 0 }));
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = pos[i].x - pos[j].x;
        let dy = pos[i].y - pos[j].y;
        let d = Math.hypot(dx, dy);
        if (d < 1e-9) {
          // Coincident points: nudge apart deterministically.
          dx = 1e-3 * (i - j);
          dy = 1e-3;
          d = Math.hypot(dx, dy);
        }
        const force = (k * k) / d;
        disp[i].x += (dx / d) * force;
        disp[i].y += (dy / d) * force;
        disp[j].x -= (dx / d) * force;
        disp[j].y -= (dy / d) * force;
      }
    }
    for (const { a, b } of edges) {
      const dx = pos[a].x - pos[b].x;
      const dy = pos[a].y - pos[b].y;
      const d = Math.hypot(dx, dy) || 1e-9;
      const force = (d * d) / k;
      disp[a].x -= (dx / d) * force;
      disp[a].y -= (dy / d) * force;
      disp[b].x += (dx / d) * force;
      disp[b].y += (dy / d) * force;
    }
    const temp = (width / 10) * (1 - iter / iterations);
    for (let i = 0; i < n; i++) {
      const d = Math.hypot(disp[i].x, disp[i].y) || 1e-9;
      const step = Math.min(d, temp);
      pos[i].x += (disp[i].x / d) * step;
      pos[i].y += (disp[i].y / d) * step;
    }
  }

  // Rescale into the viewport with a margin.
  const margin = 40;
  const xs = pos.map((p) => p.x);
  const ys = pos.map((p) => p.y);
  const [minX, maxX] = [Math.min(...xs), Math.max(...xs)];
  const [minY, maxY] = [Math.min(...ys), Math.max(...ys)];
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  ids.forEach((id, i) => {
    positions.set(id, {
      x: margin + ((pos[i].x - minX) / spanX) * (width - 2 * margin),
      y: margin + ((pos[i].y - minY) / spanY) * (height - 2 * margin),
    });
  });
  return positions;
}
