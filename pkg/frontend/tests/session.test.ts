/**
 * Contract tests against a mocked socket replaying a recorded transcript:
 * every number the view model exposes must equal the fixture value
 * verbatim, because the UI computes none of them.
 */

import { readFileSync } from "node:fs";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { PracticeSession, SocketLike } from "../src/session.js";

interface Fixture {
  target: string;
  mode: "test" | "learn";
  messages: Array<Record<string, unknown>>;
}

const fixture: Fixture = JSON.parse(
  readFileSync(new URL("./session_fixture.json", import.meta.url), "utf8"),
);

class FakeSocket implements SocketLike {
  static instances: FakeSocket[] = [];
  sent: string[] = [];
  closed = false;
  onopen: (() => void) | null = null;
  onmessage: ((event: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;

  constructor(public url: string) {
    FakeSocket.instances.push(this);
  }

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onopen?.();
  }

  replay(messages: Array<Record<string, unknown>>): void {
    for (const message of messages) {
      this.onmessage?.({ data: JSON.stringify(message) });
    }
  }
}

function makeSession(onChange?: (view: unknown) => void): PracticeSession {
  return new PracticeSession({
    baseUrl: "ws://unit.test",
    mode: fixture.mode,
    target: fixture.target,
    makeSocket: (url) => new FakeSocket(url),
    frameRate: 30,
    reconnectDelayMs: 50,
    onChange: onChange as never,
  });
}

beforeEach(() => {
  FakeSocket.instances = [];
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("session lifecycle", () => {
  it("builds the session url from mode and target", () => {
    const session = makeSession();
    expect(session.url()).toBe(
      `ws://unit.test/session?mode=${fixture.mode}&target=${fixture.target}`,
    );
  });

  it("goes live on open and reconnecting on unexpected close", () => {
    const session = makeSession();
    session.connect();
    const socket = FakeSocket.instances[0];
    expect(session.view.status).toBe("connecting");
    socket.open();
    expect(session.view.status).toBe("live");
    socket.onclose?.();
    expect(session.view.status).toBe("reconnecting");
    vi.advanceTimersByTime(60); // the restart opens a second socket
    expect(FakeSocket.instances).toHaveLength(2);
  });

  it("user close is final", () => {
    const session = makeSession();
    session.connect();
    FakeSocket.instances[0].open();
    session.close();
    expect(session.view.status).toBe("closed");
    vi.advanceTimersByTime(500);
    expect(FakeSocket.instances).toHaveLength(1);
  });
});

describe("fixture replay renders values verbatim", () => {
  function replayAll(): PracticeSession {
    const session = makeSession();
    session.connect();
    const socket = FakeSocket.instances[0];
    socket.open();
    socket.replay(fixture.messages);
    return session;
  }

  it("confidence bars equal the last per-gesture map exactly", () => {
    const session = replayAll();
    const lastConfidence = [...fixture.messages]
      .reverse()
      .find((m) => m.type === "confidence")!;
    expect(session.view.bars).toEqual(lastConfidence.per_gesture);
    expect(session.view.liveLabel).toBe(lastConfidence.label);
  });

  it("the recognition event is carried over unchanged", () => {
    const session = replayAll();
    const event = fixture.messages.find((m) => m.type === "event")!;
    expect(session.view.lastEvent).toEqual({
      signId: event.sign_id,
      confidence: event.confidence,
      keyposeTimestamps: event.keypose_timestamps,
      translationMatch: event.translation_match,
    });
  });

  it("the pass/fail banner mirrors the feedback message", () => {
    const session = replayAll();
    const feedback = fixture.messages.find((m) => m.type === "feedback")!;
    expect(session.view.lastFeedback).toEqual({
      target: feedback.target,
      recognized: feedback.recognized,
      score: feedback.score,
      passed: feedback.passed,
      deviation: feedback.deviation,
    });
    expect(session.view.banner?.kind).toBe(feedback.passed ? "pass" : "fail");
    expect(session.view.banner?.text).toContain(feedback.recognized as string);
  });

  it("every bar update along the way was a server value", () => {
    const seen: Array<Record<string, number>> = [];
    const session = makeSession();
    session.connect();
    const socket = FakeSocket.instances[0];
    socket.open();
    for (const message of fixture.messages) {
      socket.onmessage?.({ data: JSON.stringify(message) });
      if (message.type === "confidence") {
        seen.push(message.per_gesture as Record<string, number>);
        expect(session.view.bars).toEqual(message.per_gesture);
      }
    }
    expect(seen.length).toBeGreaterThan(10);
  });
});

describe("frame streaming", () => {
  it("streams frames at the configured rate while live", () => {
    const session = makeSession();
    session.connect();
    const socket = FakeSocket.instances[0];
    socket.open();
    session.startStreaming((t) => ({ type: "frame", t }));
    vi.advanceTimersByTime(1000);
    expect(socket.sent.length).toBeGreaterThanOrEqual(29);
    expect(socket.sent.length).toBeLessThanOrEqual(31);
    const times = socket.sent.map((s) => (JSON.parse(s) as { t: number }).t);
    for (let i = 1; i < times.length; i++) {
      expect(times[i]).toBeGreaterThan(times[i - 1]); // monotonic timestamps
    }
    session.stopStreaming();
  });

  it("finish sends the finish control message", () => {
    const session = makeSession();
    session.connect();
    const socket = FakeSocket.instances[0];
    socket.open();
    session.finish();
    expect(JSON.parse(socket.sent.at(-1)!)).toEqual({ type: "finish" });
  });
});
