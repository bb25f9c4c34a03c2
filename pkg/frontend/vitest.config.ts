import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // The end-to-end test boots the Python gateway and walks a full
    // trial over a real websocket, which can take a while under load.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
