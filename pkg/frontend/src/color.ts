/** Rainbow color scale for vertex colorings. */

// Low-to-high spectrum: red, yellow, green, blue, mauve.
const STOPS: [number, number, number][] = [
  [214, 39, 40],
  [255, 221, 0],
  [44, 160, 44],
  [31, 119, 180],
  [180, 120, 200],
];

const MISSING_FILL = "#cccccc";

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** Interpolate the spectrum at t in [0, 1]. */
export function spectrum(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const scaled = clamped * (STOPS.length - 1);
  const lo = Math.min(STOPS.length - 2, Math.floor(scaled));
  const frac = scaled - lo;
  const [r, g, b] = STOPS[lo].map((c, ch) =>
    Math.round(lerp(c, STOPS[lo + 1][ch], frac)),
  );
  return `rgb(${r}, ${g}, ${b})`;
}

/**
 * Map coloring values to fills, normalizing over the finite values present.
 * Balls with no value (null) render in neutral grey; a constant coloring
 * maps everything to the middle of the spectrum.
 */
export function colorScale(
  values: (number | null)[],
): (value: number | null) => string {
  const finite = values.filter((v): v is number => v !== null);
  const min = Math.min(...finite);
  const max = Math.max(...finite);
  return (value) => {
    if (value === null) return MISSING_FILL;
    if (max === min) return spectrum(0.5);
    return spectrum((value - min) / (max - min));
  };
}
