import { defineConfig } from "vitest/config";

// The parity suite boots a real service process, so hooks and tests get
// generous timeouts.
export default defineConfig({
  test: {
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
