/** Colorblind-safe colors and the contrast check that keeps them honest.
 *
 * Cluster colors come from the Okabe-Ito palette (blue/orange/green/pink/
 * sky/vermillion) extended with yellow and black; the status triple swaps
 * the classic red/green for vermillion/bluish-green. `checkPalette` verifies
 * that every pair stays distinguishable (CIE76 deltaE in Lab) under normal
 * vision and under simulated protanopia and deuteranopia (Vienot dichromat
 * projections in linear RGB).
 */

export const CLUSTER_COLORS = [
  "#0072B2", // blue
  "#E69F00", // orange
  "#009E73", // bluish green
  "#CC79A7", // reddish purple
  "#56B4E9", // sky blue
  "#D55E00", // vermillion
  "#F0E442", // yellow
  "#000000", // black
];

export const STATUS_COLORS: Record<string, string> = {
  correct: "#009E73",
  incorrect: "#D55E00",
  unattempted: "#C8C8C8",
};

export const FAMILY_COLORS = {
  incorrect: "#D55E00",
  hints: "#0072B2",
};

export const NEUTRAL_EDGE = "#888888";

type Vec3 = [number, number, number];
type Mat3 = [Vec3, Vec3, Vec3];

const PROTANOPIA: Mat3 = [
  [0.11238, 0.88762, 0.0],
  [0.11238, 0.88762, 0.0],
  [0.00401, -0.00401, 1.0],
];

const DEUTERANOPIA: Mat3 = [
  [0.29275, 0.70725, 0.0],
  [0.29275, 0.70725, 0.0],
  [-0.02234, 0.02234, 1.0],
];

function hexToLinearRgb(hex: string): Vec3 {
  const channel = (i: number) => parseInt(hex.slice(i, i + 2), 16) / 255;
  const toLinear = (c: number) => (c <= 0.04045 ? c / 12.92 : ((c + 0.055) / 1.055) ** 2.4);
  return [toLinear(channel(1)), toLinear(channel(3)), toLinear(channel(5))];
}

function apply(m: Mat3, v: Vec3): Vec3 {
  const clamp = (x: number) => Math.min(1, Math.max(0, x));
  return [
    clamp(m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2]),
    clamp(m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2]),
    clamp(m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]),
  ];
}

function linearRgbToLab([r, g, b]: Vec3): Vec3 {
  const x = 0.4124 * r + 0.3576 * g + 0.1805 * b;
  const y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
  const z = 0.0193 * r + 0.1192 * g + 0.9505 * b;
  const f = (t: number) => (t > 0.008856 ? Math.cbrt(t) : 7.787 * t + 16 / 116);
  const [fx, fy, fz] = [f(x / 0.95047), f(y / 1.0), f(z / 1.08883)];
  return [116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)];
}

function deltaE(a: Vec3, b: Vec3): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

export type Vision = "normal" | "protanopia" | "deuteranopia";

export function simulatedLab(hex: string, vision: Vision): Vec3 {
  let lin = hexToLinearRgb(hex);
  if (vision === "protanopia") lin = apply(PROTANOPIA, lin);
  if (vision === "deuteranopia") lin = apply(DEUTERANOPIA, lin);
  return linearRgbToLab(lin);
}

export interface PaletteReport {
  ok: boolean;
  minDelta: number;
  worstPair: [string, string] | null;
  worstVision: Vision | null;
}

/** Every color pair must stay at least `threshold` CIE76 units apart under
 * normal vision and both dichromat simulations. */
export function checkPalette(colors: string[], threshold = 12): PaletteReport {
  let minDelta = Infinity;
  let worstPair: [string, string] | null = null;
  let worstVision: Vision | null = null;
  const visions: Vision[] = ["normal", "protanopia", "deuteranopia"];
  for (const vision of visions) {
    const labs = colors.map((c) => simulatedLab(c, vision));
    for (let i = 0; i < colors.length; i++) {
      for (let j = i + 1; j < colors.length; j++) {
        const d = deltaE(labs[i], labs[j]);
        if (d < minDelta) {
          minDelta = d;
          worstPair = [colors[i], colors[j]];
          worstVision = vision;
        }
      }
    }
  }
  return { ok: minDelta >= threshold, minDelta, worstPair, worstVision };
}

export function clusterColor(index: number): string {
  return CLUSTER_COLORS[index % CLUSTER_COLORS.length];
}
