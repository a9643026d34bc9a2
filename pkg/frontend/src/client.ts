/** Session-server client. The IDE talks to nothing but these endpoints. */

import type {
  CalculusMode,
  NavigationMode,
  TheoremInfo,
  WireState,
} from "./protocol.js";

export interface Response {
  status: number;
  body: unknown;
}

export interface Transport {
  request(method: string, path: string, body?: unknown): Promise<Response>;
}

export class HttpTransport implements Transport {
  constructor(private baseUrl: string) {}

  async request(method: string, path: string, body?: unknown): Promise<Response> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : {},
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    return { status: res.status, body: await res.json() };
  }
}

export class ServerError extends Error {
  constructor(message: string, public readonly payload: unknown) {
    super(message);
  }
}

function firstDiagnostic(body: unknown): string {
  const diags = (body as { diagnostics?: { message: string }[] })?.diagnostics;
  if (diags && diags.length > 0) return diags[0].message;
  return "request failed";
}

export class SessionClient {
  constructor(private transport: Transport) {}

  async create(
    script: string,
    navigation: NavigationMode,
    calculusMode: CalculusMode,
  ): Promise<WireState> {
    const r = await this.transport.request("POST", "/sessions", {
      script,
      navigation,
      calculus_mode: calculusMode,
    });
    if (r.status !== 200) throw new ServerError(firstDiagnostic(r.body), r.body);
    return r.body as WireState;
  }

  async step(
    sessionId: string,
    command: "forward" | "backward" | "run_to" | "edit",
    index?: number,
    text?: string,
  ): Promise<WireState> {
    const r = await this.transport.request(
      "POST",
      `/sessions/${sessionId}/step`,
      { command, index: index ?? null, text: text ?? null },
    );
    if (r.status !== 200) throw new ServerError(firstDiagnostic(r.body), r.body);
    return r.body as WireState;
  }

  async state(sessionId: string): Promise<WireState> {
    const r = await this.transport.request("GET", `/sessions/${sessionId}/state`);
    if (r.status !== 200) throw new ServerError(firstDiagnostic(r.body), r.body);
    return r.body as WireState;
  }

  async theorems(sessionId: string): Promise<TheoremInfo[]> {
    const r = await this.transport.request(
      "GET",
      `/sessions/${sessionId}/theorems`,
    );
    if (r.status !== 200) throw new ServerError(firstDiagnostic(r.body), r.body);
    return (r.body as { theorems: TheoremInfo[] }).theorems;
  }

  async extract(
    sessionId: string,
    name: string,
    dialect: string,
  ): Promise<string> {
    const r = await this.transport.request(
      "GET",
      `/sessions/${sessionId}/extract?name=${encodeURIComponent(name)}` +
        `&dialect=${encodeURIComponent(dialect)}`,
    );
    if (r.status !== 200) throw new ServerError(firstDiagnostic(r.body), r.body);
    return (r.body as { source: string }).source;
  }
}
