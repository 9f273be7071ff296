// Number display matching the service's canonical serializer: at most
// 9 significant digits, no trailing zeros, two-digit exponents.  Using
// the same rendering guarantees displayed energies are byte-identical
// to the payload the server sent.

import type { Energy } from "./types.js";

function trimZeros(mantissa: string): string {
  if (!mantissa.includes(".")) return mantissa;
  return mantissa.replace(/0+$/, "").replace(/\.$/, "");
}

/** Canonical text for a finite number (e.g. 0.105360516, -0, 1e+09). */
export function formatCanonical(x: number): string {
  if (!Number.isFinite(x)) throw new Error("non-finite values arrive as strings");
  if (Object.is(x, -0)) return "-0";
  // the serializer uses exponential notation below 1e-4; toPrecision
  // would stay in fixed notation down to 1e-7
  const s = x !== 0 && Math.abs(x) < 1e-4 ? x.toExponential(8) : x.toPrecision(9);
  const e = s.indexOf("e");
  if (e < 0) return trimZeros(s);
  const mantissa = trimZeros(s.slice(0, e));
  const sign = s[e + 1] === "-" ? "-" : "+";
  const digits = s.slice(e + 1).replace(/^[+-]/, "").padStart(2, "0");
  return `${mantissa}e${sign}${digits}`;
}

/** Display text for an energy field ("inf" strings pass through). */
export function formatEnergy(v: Energy): string {
  return typeof v === "string" ? v : formatCanonical(v);
}
