/**
 * Typed client for the classifier service protocol.
 *
 * Plain fetch for request/response routes; the event stream is consumed
 * through fetch + ReadableStream (works in browsers and in node tests)
 * with automatic reconnect and exponential backoff.
 */

export interface EngineState {
  rules: number;
  samples_seen: number;
  labeled: number;
  budget_spent: number;
  theta: number;
  archived: number;
  reserved: number;
  done: boolean;
  classes: string[];
  features: string[];
  n_train: number;
  n_test: number;
}

export interface LabelQuery {
  id: number;
  index: number;
  features: number[];
  output_conflict: number;
  input_posterior: number[];
  deadline_ms: number;
}

export interface StructuralEvent {
  index: number;
  type: string;
  rules: number;
}

export type StreamMessage =
  | { type: "query"; query: LabelQuery }
  | { type: "state"; state: EngineState }
  | { type: "event"; event: StructuralEvent };

export interface SubmitResult {
  accepted: boolean;
  error?: string;
  status: number;
}

export class ApiClient {
  constructor(private readonly base: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(`${this.base}${path}`);
    if (!resp.ok) throw new Error(`${path}: HTTP ${resp.status}`);
    return (await resp.json()) as T;
  }

  getState(): Promise<EngineState> {
    return this.getJson<EngineState>("/state");
  }

  getQuery(): Promise<LabelQuery | null> {
    return this.getJson<LabelQuery | null>("/query");
  }

  getRuleTrace(): Promise<Array<[number, number]>> {
    return this.getJson<Array<[number, number]>>("/trace/rules");
  }

  getWeightTrace(): Promise<number[][]> {
    return this.getJson<number[][]>("/trace/weights");
  }

  getEvents(): Promise<StructuralEvent[]> {
    return this.getJson<StructuralEvent[]>("/events");
  }

  async submitLabel(id: number, cls: number): Promise<SubmitResult> {
    const resp = await fetch(`${this.base}/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ id, class: cls }),
    });
    const body = (await resp.json()) as { accepted: boolean; error?: string };
    return { ...body, status: resp.status };
  }
}

/** Split an SSE byte stream into `data:` payload strings. */
export function createSseParser(onData: (payload: string) => void) {
  let buffer = "";
  return (chunk: string): void => {
    buffer += chunk;
    let cut: number;
    while ((cut = buffer.indexOf("\n\n")) >= 0) {
      const frame = buffer.slice(0, cut);
      buffer = buffer.slice(cut + 2);
      for (const line of frame.split("\n")) {
        if (line.startsWith("data: ")) onData(line.slice(6));
      }
    }
  };
}

export interface StreamHandle {
  close(): void;
}

/**
 * Subscribe to the service event stream.  Reconnects with exponential
 * backoff (capped at 10 s) until close() is called or the engine reports
 * completion.
 */
export function subscribeStream(
  base: string,
  onMessage: (msg: StreamMessage) => void,
  onStatus?: (connected: boolean) => void,
): StreamHandle {
  let closed = false;
  let backoffMs = 500;

  const connect = async (): Promise<void> => {
    while (!closed) {
      try {
        const resp = await fetch(`${base}/stream`);
        if (!resp.ok || !resp.body) throw new Error(`HTTP ${resp.status}`);
        onStatus?.(true);
        backoffMs = 500;
        const reader = resp.body.getReader();
        const decoder = new TextDecoder();
        const parse = createSseParser((payload) => {
          try {
            onMessage(JSON.parse(payload) as StreamMessage);
          } catch {
            /* malformed frame: skip */
          }
        });
        for (;;) {
          const { done, value } = await reader.read();
          if (done || closed) break;
          parse(decoder.decode(value, { stream: true }));
        }
      } catch {
        /* fall through to reconnect */
      }
      onStatus?.(false);
      if (closed) return;
      await new Promise((resolve) => setTimeout(resolve, backoffMs));
      backoffMs = Math.min(backoffMs * 2, 10_000);
    }
  };

  void connect();
  return {
    close() {
      closed = true;
    },
  };
}
