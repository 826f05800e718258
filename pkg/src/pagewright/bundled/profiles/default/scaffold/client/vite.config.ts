import { defineConfig } from "vite";
import vue from "@vitejs/plugin-vue";

export default defineConfig({
  plugins: [vue()],
  server: {
    proxy: {
      "/api": {
        target: "http://127.0.0.1:" + (process.env.BACKEND_PORT || "4301"),
        changeOrigin: true
      }
    }
  }
});
