import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // Individual files opt into jsdom with an @vitest-environment pragma.
    environment: "node",
    testTimeout: 20000,
    hookTimeout: 30000,
  },
});
