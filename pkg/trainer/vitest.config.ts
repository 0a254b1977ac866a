import { defineConfig } from "vitest/config";

// Training tests run real gradient steps on the pure-JS cpu backend, which
// is slow even at toy widths; give them room.
export default defineConfig({
  test: {
    testTimeout: 180_000,
    hookTimeout: 60_000,
  },
});
