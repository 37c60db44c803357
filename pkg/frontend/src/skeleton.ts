/**
 * Skeleton geometry for the canvas: orthographic projection with a
 * rotatable view, the bone list, and the mapping from feature deviations to
 * per-finger highlights.  Everything here is DOM-free so it can be tested
 * headlessly; drawing happens in app.ts.
 */

import { Joints, Vec3 } from "./handmodel.js";

/** wrist->base per finger plus the three chain segments: 20 bones. */
export const BONES: ReadonlyArray<readonly [number, number]> = (() => {
  const bones: Array<[number, number]> = [];
  for (let f = 0; f < 5; f++) {
    const base = 1 + 4 * f;
    bones.push([0, base], [base, base + 1], [base + 1, base + 2], [base + 2, base + 3]);
  }
  return bones;
})();

export interface ViewSpec {
  yaw: number;
  pitch: number;
  scale: number; // pixels per metre
  cx: number; // canvas centre
  cy: number;
}

export interface Projected {
  points: Array<[number, number]>; // 21 screen positions
  bones: ReadonlyArray<readonly [number, number]>;
}

/** Orthographic projection after yaw (about y) and pitch (about x). */
export function projectSkeleton(joints: Joints, view: ViewSpec): Projected {
  const cosY = Math.cos(view.yaw);
  const sinY = Math.sin(view.yaw);
  const cosP = Math.cos(view.pitch);
  const sinP = Math.sin(view.pitch);
  const points = joints.map((p) => {
    const x1 = cosY * p[0] + sinY * p[2];
    const z1 = -sinY * p[0] + cosY * p[2];
    const y2 = cosP * p[1] - sinP * z1;
    return [
      view.cx + view.scale * x1,
      view.cy - view.scale * y2, // screen y grows downwards
    ] as [number, number];
  });
  return { points, bones: BONES };
}

// which fingers each of the 22 feature slots touches
const TIP_TIP_PAIRS: ReadonlyArray<readonly [number, number]> = [
  [0, 1], [0, 2], [0, 3], [0, 4],
  [1, 2], [1, 3], [1, 4],
  [2, 3], [2, 4],
  [3, 4],
];

/**
 * Collapse a per-feature deviation vector (first 22 entries: the pose-0
 * block) into the worst absolute deviation per finger.
 */
export function fingerDeviation(deviation: number[]): number[] {
  const worst = [0, 0, 0, 0, 0];
  const bump = (finger: number, value: number) => {
    const v = Math.abs(value);
    if (v > worst[finger]) worst[finger] = v;
  };
  for (let i = 0; i < Math.min(deviation.length, 22); i++) {
    const v = deviation[i];
    if (i < 5) bump(i, v);
    else if (i < 15) {
      const [a, b] = TIP_TIP_PAIRS[i - 5];
      bump(a, v);
      bump(b, v);
    } else if (i < 20) bump(i - 15, v);
    else if (i === 20) bump(2, v); // hand extent: wrist to middle tip
    else {
      bump(0, v); // hand spread: thumb tip to pinky base
      bump(4, v);
    }
  }
  return worst;
}

/** Fingers whose deviation exceeds the highlight threshold. */
export function highlightedFingers(
  deviation: number[] | null,
  threshold = 0.05,
): number[] {
  if (!deviation) return [];
  const worst = fingerDeviation(deviation);
  return worst.flatMap((v, f) => (v > threshold ? [f] : []));
}

export function boneFinger(boneIndex: number): number {
  return Math.floor(boneIndex / 4);
}

export function centre(joints: Joints): Vec3 {
  const s = joints.reduce<Vec3>(
    (acc, p) => [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]],
    [0, 0, 0],
  );
  return [s[0] / joints.length, s[1] / joints.length, s[2] / joints.length];
}
