// Axial hex geometry for a flat-top layout. Direction indices must agree
// with the server's neighbor order, since move/attack acts carry the index.

export interface Axial {
  q: number;
  r: number;
}

// Same order the engine uses: dir 0 is +q, then counterclockwise.
export const DIRECTIONS: ReadonlyArray<Readonly<Axial>> = [
  { q: 1, r: 0 },
  { q: 1, r: -1 },
  { q: 0, r: -1 },
  { q: -1, r: 0 },
  { q: -1, r: 1 },
  { q: 0, r: 1 },
];

export function neighbor(pos: Axial, dir: number): Axial {
  const d = DIRECTIONS[dir];
  if (d === undefined) throw new Error(`bad direction ${dir}`);
  return { q: pos.q + d.q, r: pos.r + d.r };
}

/** Index of the step from `from` to adjacent `to`, or null if not adjacent. */
export function directionBetween(from: Axial, to: Axial): number | null {
  for (let i = 0; i < DIRECTIONS.length; i++) {
    const d = DIRECTIONS[i]!;
    if (from.q + d.q === to.q && from.r + d.r === to.r) return i;
  }
  return null;
}

export function distance(a: Axial, b: Axial): number {
  const dq = a.q - b.q;
  const dr = a.r - b.r;
  return (Math.abs(dq) + Math.abs(dr) + Math.abs(dq + dr)) / 2;
}

/** Pixel center of a hex, flat-top orientation, `size` = center-to-corner. */
export function axialToPixel(pos: Axial, size: number): { x: number; y: number } {
  const x = size * 1.5 * pos.q;
  const y = size * (Math.sqrt(3) / 2) * pos.q + size * Math.sqrt(3) * pos.r;
  return { x, y };
}

/** Six corner points of a flat-top hex centered at (cx, cy). */
export function hexCorners(cx: number, cy: number, size: number): Array<{ x: number; y: number }> {
  const corners = [];
  for (let i = 0; i < 6; i++) {
    const angle = (Math.PI / 180) * (60 * i);
    corners.push({ x: cx + size * Math.cos(angle), y: cy + size * Math.sin(angle) });
  }
  return corners;
}
