import express from "express";
import fs from "fs";
import path from "path";
import { db } from "./db";

const app = express();
app.use(express.json());

app.get("/api/health", (_req, res) => {
  res.json({ status: "ok" });
});

// Route modules in src/routes register themselves on the app.
const routesDir = path.join(__dirname, "routes");
if (fs.existsSync(routesDir)) {
  for (const file of fs.readdirSync(routesDir)) {
    if (file.endsWith(".ts") || file.endsWith(".js")) {
      // eslint-disable-next-line @typescript-eslint/no-var-requires
      const mod = require(path.join(routesDir, file));
      if (typeof mod.register === "function") {
        mod.register(app, db);
      }
    }
  }
}

const port = Number(process.env.PORT || 4301);
app.listen(port, () => {
  console.log(`server listening on ${port}`);
});
