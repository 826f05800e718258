import type { Express } from "express";
import type Database from "better-sqlite3";
import { hashPassword } from "./auth";

export function register(app: Express, db: Database.Database) {
  app.post("/api/auth/register", (req, res) => {
    const { email, password } = req.body ?? {};
    if (!email || !password || String(password).length < 6) {
      return res.status(400).json({ error: "valid email and password (6+ chars) required" });
    }
    try {
      const info = db
        .prepare("INSERT INTO tb_user (email, password_hash) VALUES (?, ?)")
        .run(email, hashPassword(password));
      res.status(201).json({ id: Number(info.lastInsertRowid), email });
    } catch {
      res.status(409).json({ error: "email already registered" });
    }
  });
}
