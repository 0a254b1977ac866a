/** Small deterministic PRNG utilities.
 *
 * Training must be reproducible from one integer seed, so batch shuffles and
 * the per-op seeds handed to tfjs all come from one mulberry32 stream instead
 * of Math.random.
 */

export type Rng = () => number;

/** mulberry32: fast 32-bit generator, returns floats in [0, 1). */
export function mulberry32(seed: number): Rng {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Fisher-Yates shuffle of 0..n-1 driven by the given stream. */
export function shuffledIndices(n: number, rng: Rng): Int32Array {
  const idx = new Int32Array(n);
  for (let i = 0; i < n; i++) idx[i] = i;
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    const tmp = idx[i];
    idx[i] = idx[j];
    idx[j] = tmp;
  }
  return idx;
}

/** Fresh 31-bit op seed; tfjs seeded kernels want plain integers. */
export function nextOpSeed(rng: Rng): number {
  return Math.floor(rng() * 0x7fffffff);
}
