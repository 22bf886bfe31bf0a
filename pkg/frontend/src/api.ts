// Typed client for the switchboard HTTP API.

export type Strategy = "semantic" | "keyword" | "hybrid" | "random";

export interface LatencyBreakdown {
  router: number;
  expert: number;
  overhead: number;
  total: number;
}

export interface ChatResponse {
  reply: string;
  domain: string;
  used_fallback: boolean;
  latency: LatencyBreakdown;
  trace_id: string;
}

export interface AdapterEntry {
  name: string;
  description: string;
  is_fallback: boolean;
}

export interface HealthResponse {
  status: "ok" | "degraded";
  backend_reachable: boolean;
  adapters_loaded: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class SwitchboardClient {
  constructor(private baseUrl: string) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.text());
    }
    return (await resp.json()) as T;
  }

  async chat(
    sessionId: string,
    message: string,
    strategy?: Strategy,
  ): Promise<ChatResponse> {
    return this.post<ChatResponse>("/chat", {
      session_id: sessionId,
      message,
      ...(strategy ? { strategy } : {}),
    });
  }

  async adapters(): Promise<AdapterEntry[]> {
    const resp = await fetch(`${this.baseUrl}/adapters`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as AdapterEntry[];
  }

  async health(): Promise<HealthResponse> {
    const resp = await fetch(`${this.baseUrl}/health`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as HealthResponse;
  }
}
