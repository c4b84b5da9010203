/**
 * Console state machine.
 *
 * Holds the pending query, live traces, and the structural-event log;
 * guards against stale or duplicate label submissions.  Pure TypeScript so
 * the whole lifecycle is unit-testable without a DOM.
 */

import type {
  ApiClient,
  EngineState,
  LabelQuery,
  StructuralEvent,
  StreamMessage,
} from "./api.js";

export interface PendingView {
  query: LabelQuery;
  receivedAt: number;
  submitted: boolean;
}

export type Listener = () => void;

export class ConsoleStore {
  state: EngineState | null = null;
  pending: PendingView | null = null;
  ruleTrace: Array<[number, number]> = [];
  weightTrace: number[][] = [];
  events: StructuralEvent[] = [];
  toast = "";

  private listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly now: () => number = () => Date.now(),
  ) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Remaining milliseconds before the pending query expires. */
  remainingMs(): number {
    if (!this.pending) return 0;
    const elapsed = this.now() - this.pending.receivedAt;
    return Math.max(0, this.pending.query.deadline_ms - elapsed);
  }

  expired(): boolean {
    return this.pending !== null && this.remainingMs() <= 0;
  }

  /** Posterior normalized for display; guards degenerate payloads. */
  displayPosterior(): number[] {
    if (!this.pending) return [];
    const raw = this.pending.query.input_posterior;
    const total = raw.reduce((a, b) => a + b, 0);
    if (total <= 0) return raw.map(() => 1 / raw.length);
    return raw.map((v) => v / total);
  }

  handleMessage(msg: StreamMessage): void {
    if (msg.type === "query") {
      this.setQuery(msg.query);
    } else if (msg.type === "state") {
      this.state = msg.state;
      // an answered or expired query disappears from the engine side
      if (this.pending?.submitted) this.pending = null;
    } else if (msg.type === "event") {
      this.pushEvent(msg.event);
    }
    this.emit();
  }

  setQuery(query: LabelQuery | null): void {
    if (query === null) {
      this.pending = null;
    } else if (!this.pending || this.pending.query.id !== query.id) {
      this.pending = { query, receivedAt: this.now(), submitted: false };
    }
    this.emit();
  }

  pushEvent(event: StructuralEvent): void {
    this.events.push(event);
    if (event.type === "query_timeout" && this.pending && !this.pending.submitted) {
      // the engine skipped the sample; reflect, never resurrect
      this.pending = null;
      this.toast = "query expired; sample skipped";
    }
    this.emit();
  }

  async refreshQuery(): Promise<void> {
    this.setQuery(await this.api.getQuery());
  }

  async refreshTraces(): Promise<void> {
    const [rules, weights, events] = await Promise.all([
      this.api.getRuleTrace(),
      this.api.getWeightTrace(),
      this.api.getEvents(),
    ]);
    this.ruleTrace = rules;
    this.weightTrace = weights;
    this.events = events;
    this.emit();
  }

  async refreshState(): Promise<void> {
    this.state = await this.api.getState();
    this.emit();
  }

  /**
   * Submit the operator's class choice for the pending query.
   * Stale or duplicate submissions never go out; a rejected submission
   * refreshes the pending view instead of resurrecting it.
   */
  async submit(cls: number): Promise<boolean> {
    if (!this.pending || this.pending.submitted) return false;
    if (this.expired()) {
      this.toast = "query expired; sample skipped";
      this.pending = null;
      this.emit();
      return false;
    }
    const id = this.pending.query.id;
    this.pending.submitted = true;
    const result = await this.api.submitLabel(id, cls);
    if (result.accepted) {
      this.pending = null;
      this.toast = "";
      this.emit();
      return true;
    }
    this.toast = result.error ?? "submission rejected";
    this.pending = null;
    await this.refreshQuery();
    return false;
  }
}
