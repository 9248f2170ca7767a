/** Shared fixtures: the captured demo snapshot plus an empty-stream snapshot. */

import fixture from "./fixtures/demo_snapshot.json";
import type { SnapshotWire } from "../src/types.js";

export function demoSnapshot(): SnapshotWire {
  return structuredClone(fixture) as unknown as SnapshotWire;
}

export function emptySnapshot(): SnapshotWire {
  return {
    version: 1,
    events_seen: 0,
    computed_at: 0,
    kpis: {
      min_score: null,
      max_score: null,
      median_score: null,
      mean_score: null,
      completed_count: 0,
      active_students: 0,
      events_seen: 0,
      version: 1,
    },
    progress: [],
    kc_summary: { kcs: [] },
    histogram: { bin_width: 10, bins: [0, 0, 0, 0, 0, 0, 0, 0, 0, 0], edges: [0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100] },
    clustering: { available: false, reason: "insufficient_observations" },
    alerts: [],
    recommendations: [],
    degraded: false,
    error: null,
  };
}

export interface FakeEventSource {
  url: string;
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
  closed: boolean;
  emitOpen(): void;
  emitVersion(version: number): void;
  emitError(): void;
}

export function makeFakeEventSourceFactory(): { created: FakeEventSource[]; factory: (url: string) => FakeEventSource } {
  const created: FakeEventSource[] = [];
  const factory = (url: string): FakeEventSource => {
    const source: FakeEventSource = {
      url,
      onopen: null,
      onmessage: null,
      onerror: null,
      closed: false,
      close() {
        this.closed = true;
      },
      emitOpen() {
        this.onopen?.({});
      },
      emitVersion(version: number) {
        this.onmessage?.({ data: JSON.stringify({ version }) });
      },
      emitError() {
        this.onerror?.({});
      },
    };
    created.push(source);
    return source;
  };
  return { created, factory };
}

/** A stub /api/snapshot server: serves whatever snapshot is currently set. */
export function makeStubFetcher(initial: SnapshotWire) {
  const state = { snapshot: initial, calls: 0 };
  const fetcher = async (url: string) => {
    state.calls += 1;
    if (!url.endsWith("/api/snapshot")) throw new Error(`unexpected fetch ${url}`);
    const body = JSON.stringify(state.snapshot);
    return {
      ok: true,
      status: 200,
      json: async () => JSON.parse(body),
    };
  };
  return { state, fetcher };
}
