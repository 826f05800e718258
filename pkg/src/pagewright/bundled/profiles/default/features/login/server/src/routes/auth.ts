import type { Express } from "express";
import type Database from "better-sqlite3";
import crypto from "crypto";

export function hashPassword(password: string): string {
  return crypto.createHash("sha256").update(password).digest("hex");
}

export function register(app: Express, db: Database.Database) {
  app.post("/api/auth/login", (req, res) => {
    const { email, password } = req.body ?? {};
    if (!email || !password) {
      return res.status(400).json({ error: "email and password are required" });
    }
    const row = db
      .prepare("SELECT id, email, password_hash FROM tb_user WHERE email = ?")
      .get(email) as { id: number; email: string; password_hash: string } | undefined;
    if (!row || row.password_hash !== hashPassword(password)) {
      return res.status(401).json({ error: "invalid credentials" });
    }
    res.json({ id: row.id, email: row.email });
  });
}
