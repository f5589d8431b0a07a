import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["test/**/*.test.ts"],
    // the integration test boots the annotation service in a subprocess
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
