/** API access: snapshot fetches and the SSE push channel with reconnect.
 *
 * The dashboard renders server results verbatim; nothing here computes
 * analytics. EventSource and fetch are injectable so tests can drive the
 * channel without a browser/network.
 */

import type { SnapshotWire, SpecWire } from "./types.js";

export type ConnectionStatus = "connecting" | "live" | "disconnected";

export interface EventSourceLike {
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export type Fetcher = (url: string) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

const defaultFetcher: Fetcher = (url) => fetch(url);

export async function fetchSnapshot(baseUrl: string, fetcher: Fetcher = defaultFetcher): Promise<SnapshotWire> {
  const response = await fetcher(`${baseUrl}/api/snapshot`);
  if (!response.ok) throw new Error(`snapshot fetch failed: ${response.status}`);
  return (await response.json()) as SnapshotWire;
}

export async function fetchSpec(baseUrl: string, fetcher: Fetcher = defaultFetcher): Promise<SpecWire> {
  const response = await fetcher(`${baseUrl}/api/spec`);
  if (!response.ok) throw new Error(`spec fetch failed: ${response.status}`);
  return (await response.json()) as SpecWire;
}

export interface PushHandlers {
  onVersion(version: number): void;
  onStatus(status: ConnectionStatus): void;
}

export interface PushChannelOptions {
  factory?: EventSourceFactory;
  baseDelayMs?: number;
  maxDelayMs?: number;
  schedule?: (fn: () => void, ms: number) => unknown;
}

/** Subscribes to /api/stream; on error, reconnects with exponential backoff.
 * On every (re)connect the server immediately pushes the current version, so
 * a resumed client never misses the latest snapshot. */
export class PushChannel {
  private source: EventSourceLike | null = null;
  private attempts = 0;
  private closed = false;

  private readonly factory: EventSourceFactory;
  private readonly baseDelayMs: number;
  private readonly maxDelayMs: number;
  private readonly schedule: (fn: () => void, ms: number) => unknown;

  constructor(
    private readonly baseUrl: string,
    private readonly handlers: PushHandlers,
    options: PushChannelOptions = {},
  ) {
    this.factory = options.factory ?? ((url) => new EventSource(url) as unknown as EventSourceLike);
    this.baseDelayMs = options.baseDelayMs ?? 500;
    this.maxDelayMs = options.maxDelayMs ?? 10_000;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
  }

  connect(): void {
    if (this.closed) return;
    this.handlers.onStatus(this.attempts === 0 ? "connecting" : "disconnected");
    const source = this.factory(`${this.baseUrl}/api/stream`);
    this.source = source;
    source.onopen = () => {
      this.attempts = 0;
      this.handlers.onStatus("live");
    };
    source.onmessage = (event) => {
      this.attempts = 0;
      this.handlers.onStatus("live");
      try {
        const payload = JSON.parse(event.data) as { version?: number };
        if (typeof payload.version === "number") this.handlers.onVersion(payload.version);
      } catch {
        // malformed push; ignore and wait for the next one
      }
    };
    source.onerror = () => {
      source.close();
      if (this.closed) return;
      this.handlers.onStatus("disconnected");
      const delay = Math.min(this.baseDelayMs * 2 ** this.attempts, this.maxDelayMs);
      this.attempts += 1;
      this.schedule(() => this.connect(), delay);
    };
  }

  close(): void {
    this.closed = true;
    this.source?.close();
  }
}
