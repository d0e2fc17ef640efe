/** Heatmap shading for layer scores. Presentation only; scores come from
 * the exported layer and are never recomputed here. */

const LOW: [number, number, number] = [0xf1, 0xf3, 0xf5]; // score 0
const HIGH: [number, number, number] = [0x2f, 0x9e, 0x44]; // score 100

/** Linear interpolation between the endpoint colors, per channel. */
export function heatColor(score: number): string {
  const clamped = Math.max(0, Math.min(100, score)) / 100;
  const channels = LOW.map((low, i) => Math.round(low + (HIGH[i] - low) * clamped));
  return `rgb(${channels[0]}, ${channels[1]}, ${channels[2]})`;
}

/** Readable text color against a heat cell. */
export function heatTextColor(score: number): string {
  return score > 60 ? "#ffffff" : "#1d2430";
}
