import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    port: 5173,
    // the engine API ("repgrid serve") runs on 8765 by default
    proxy: {
      "/api": {
        target: "http://127.0.0.1:8765",
        changeOrigin: true,
        rewrite: (path) => path.replace(/^\/api/, ""),
      },
    },
  },
  test: {
    environment: "jsdom",
  },
});
