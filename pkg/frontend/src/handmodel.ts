/**
 * Parametric 21-joint hand, mirroring the corpus generator's construction:
 * wrist at the origin, five fingers fanned in the x-y plane, each chain of
 * three segments curled progressively towards the palm normal.  Keeping the
 * constants and operation order identical to the generator is what the
 * golden-vector tests pin down.
 */

export type Vec3 = [number, number, number];
export type Joints = Vec3[]; // length 21: wrist, then 4 rows per finger

export const FINGERS = ["thumb", "index", "middle", "ring", "pinky"] as const;
export type FingerName = (typeof FINGERS)[number];

const BASE_ANGLE = [-0.9, -0.25, 0.0, 0.22, 0.45];
const BASE_RADIUS = [0.45, 0.98, 1.0, 0.96, 0.88];
const SEGMENTS: ReadonlyArray<readonly [number, number, number]> = [
  [0.4, 0.35, 0.3],
  [0.42, 0.26, 0.2],
  [0.45, 0.28, 0.22],
  [0.42, 0.26, 0.2],
  [0.34, 0.2, 0.16],
];
const CURL_STEP = (88.0 * Math.PI) / 180.0;
export const MAX_SPREAD = 0.6;

type Mat3 = [Vec3, Vec3, Vec3];

function rotationAbout(axis: Vec3, angle: number): Mat3 {
  const [x, y, z] = axis;
  const k: Mat3 = [
    [0, -z, y],
    [z, 0, -x],
    [-y, x, 0],
  ];
  const k2 = matMul(k, k);
  const s = Math.sin(angle);
  const c = 1 - Math.cos(angle);
  const out: Mat3 = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
  ];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      out[i][j] += s * k[i][j] + c * k2[i][j];
    }
  }
  return out;
}

function matMul(a: Mat3, b: Mat3): Mat3 {
  const out: Mat3 = [
    [0, 0, 0],
    [0, 0, 0],
    [0, 0, 0],
  ];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      for (let k = 0; k < 3; k++) {
        out[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return out;
}

function apply(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
    m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
    m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
  ];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function norm(v: Vec3): number {
  return Math.hypot(v[0], v[1], v[2]);
}

export interface PoseParams {
  curl: number[]; // 5 values in [0, 1]
  spread: number[]; // 5 abduction angles, |a| <= MAX_SPREAD
  palmLength?: number;
}

/** Build the 21 joint positions for one set of slider values. */
export function buildHand({ curl, spread, palmLength = 0.09 }: PoseParams): Joints {
  if (curl.length !== 5 || spread.length !== 5) {
    throw new Error("need 5 curl and 5 spread values");
  }
  if (curl.some((c) => c < 0 || c > 1)) {
    throw new Error("curl fractions must lie in [0, 1]");
  }
  if (spread.some((s) => Math.abs(s) > MAX_SPREAD)) {
    throw new Error(`spread angles must lie in [-${MAX_SPREAD}, ${MAX_SPREAD}]`);
  }
  const joints: Joints = Array.from({ length: 21 }, () => [0, 0, 0] as Vec3);
  const normal: Vec3 = [0, 0, 1];
  for (let f = 0; f < 5; f++) {
    const theta = BASE_ANGLE[f];
    const dir0: Vec3 = [-Math.sin(theta), Math.cos(theta), 0];
    const base: Vec3 = [
      BASE_RADIUS[f] * palmLength * dir0[0],
      BASE_RADIUS[f] * palmLength * dir0[1],
      0,
    ];
    const angle = theta + spread[f];
    const straight: Vec3 = [-Math.sin(angle), Math.cos(angle), 0];
    const axisRaw = cross(straight, normal);
    const n = norm(axisRaw);
    const axis: Vec3 = [axisRaw[0] / n, axisRaw[1] / n, axisRaw[2] / n];
    const row = 1 + 4 * f;
    joints[row] = base;
    let position = base;
    SEGMENTS[f].forEach((fraction, s) => {
      const bend = curl[f] * CURL_STEP * (s + 1);
      const dir = apply(rotationAbout(axis, bend), straight);
      position = [
        position[0] + fraction * palmLength * dir[0],
        position[1] + fraction * palmLength * dir[1],
        position[2] + fraction * palmLength * dir[2],
      ];
      joints[row + 1 + s] = position;
    });
  }
  return joints;
}

/** Rigidly place the hand: yaw/pitch rotation about the centroid, then shift. */
export function placeHand(
  joints: Joints,
  yaw: number,
  pitch: number,
  offset: Vec3,
): Joints {
  const c = centroid(joints);
  const ry = rotationAbout([0, 1, 0], yaw);
  const rx = rotationAbout([1, 0, 0], pitch);
  return joints.map((p) => {
    const local: Vec3 = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
    const rotated = apply(rx, apply(ry, local));
    return [
      rotated[0] + c[0] + offset[0],
      rotated[1] + c[1] + offset[1],
      rotated[2] + c[2] + offset[2],
    ] as Vec3;
  });
}

export function centroid(joints: Joints): Vec3 {
  const sum = joints.reduce<Vec3>(
    (acc, p) => [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]],
    [0, 0, 0],
  );
  return [sum[0] / joints.length, sum[1] / joints.length, sum[2] / joints.length];
}

/** The invariants every derived frame must satisfy before it is streamed. */
export function validateJoints(joints: Joints): void {
  if (joints.length !== 21) throw new Error("a hand holds 21 joints");
  for (const p of joints) {
    if (!p.every(Number.isFinite)) throw new Error("non-finite joint");
  }
  const palm = norm([
    joints[9][0] - joints[0][0],
    joints[9][1] - joints[0][1],
    joints[9][2] - joints[0][2],
  ]);
  if (palm <= 0) throw new Error("palm length must be positive");
  for (let f = 0; f < 5; f++) {
    for (let s = 0; s < 3; s++) {
      const a = joints[1 + 4 * f + s];
      const b = joints[1 + 4 * f + s + 1];
      const seg = norm([b[0] - a[0], b[1] - a[1], b[2] - a[2]]);
      if (seg <= 0) throw new Error("zero-length finger segment");
    }
  }
}

const JOINT_NAMES = ["base", "proximal", "intermediate", "tip"] as const;

/** Encode joints as the service's frame message (database hand schema + t). */
export function frameMessage(joints: Joints, t: number): Record<string, unknown> {
  const fingers: Record<string, Record<string, number[]>> = {};
  FINGERS.forEach((name, f) => {
    const chain: Record<string, number[]> = {};
    JOINT_NAMES.forEach((joint, s) => {
      chain[joint] = [...joints[1 + 4 * f + s]];
    });
    fingers[name] = chain;
  });
  return {
    type: "frame",
    t,
    side: "right",
    wrist: [...joints[0]],
    fingers,
  };
}

/** Decode a template hand (the database schema) back into a joint array. */
export function jointsFromTemplate(hand: {
  wrist: number[];
  fingers: Record<string, Record<string, number[]>>;
}): Joints {
  const joints: Joints = Array.from({ length: 21 }, () => [0, 0, 0] as Vec3);
  joints[0] = [hand.wrist[0], hand.wrist[1], hand.wrist[2]];
  FINGERS.forEach((name, f) => {
    JOINT_NAMES.forEach((joint, s) => {
      const p = hand.fingers[name][joint];
      joints[1 + 4 * f + s] = [p[0], p[1], p[2]];
    });
  });
  return joints;
}
