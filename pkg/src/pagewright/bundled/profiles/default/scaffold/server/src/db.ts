import Database from "better-sqlite3";
import fs from "fs";
import path from "path";

const schemaPath = path.join(__dirname, "..", "schema.sql");

export const db = new Database(path.join(__dirname, "..", "data.sqlite"));
db.pragma("journal_mode = WAL");
db.exec(fs.readFileSync(schemaPath, "utf-8"));
