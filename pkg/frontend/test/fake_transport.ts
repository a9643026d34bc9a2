/** Replays recorded server exchanges in order, verifying each request. */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import type { Response, Transport } from "../src/client.js";

interface Exchange {
  request: { method: string; path: string; body: unknown };
  response: { status: number; body: unknown };
}

export class FakeTransport implements Transport {
  private queue: Exchange[];

  constructor(fixture: string) {
    const raw = readFileSync(
      join(__dirname, "..", "fixtures", fixture),
      "utf-8",
    );
    this.queue = (JSON.parse(raw) as { exchanges: Exchange[] }).exchanges;
  }

  get remaining(): number {
    return this.queue.length;
  }

  async request(method: string, path: string, body?: unknown): Promise<Response> {
    const next = this.queue.shift();
    if (!next) throw new Error(`unexpected request beyond fixture: ${method} ${path}`);
    if (next.request.method !== method || next.request.path !== path) {
      throw new Error(
        `fixture mismatch: expected ${next.request.method} ${next.request.path}, ` +
          `got ${method} ${path}`,
      );
    }
    const want = JSON.stringify(next.request.body ?? null);
    const got = JSON.stringify(body ?? null);
    if (want !== got) {
      throw new Error(`fixture body mismatch for ${path}:\nwant ${want}\ngot  ${got}`);
    }
    return next.response;
  }
}

/** A transport that returns a fixed payload for every request. */
export class StubTransport implements Transport {
  constructor(private canned: Response) {}

  async request(): Promise<Response> {
    return this.canned;
  }
}
