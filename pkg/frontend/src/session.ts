/**
 * The practice session: a WebSocket client that streams hand frames at a
 * fixed rate and reduces server messages into a view model.
 *
 * The UI never computes a confidence, an event, or a pass/fail itself:
 * every number in the view model is copied verbatim from a server message.
 * The socket is injected so tests can drive the reducer with a fake.
 */

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type SessionStatus = "connecting" | "live" | "reconnecting" | "closed";

export interface RecognitionView {
  signId: string;
  confidence: number;
  keyposeTimestamps: number[];
  translationMatch: number[];
}

export interface FeedbackView {
  target: string;
  recognized: string;
  score: number;
  passed: boolean | null;
  deviation: number[];
}

export interface SessionView {
  status: SessionStatus;
  bars: Record<string, number>; // latest per-gesture confidences, verbatim
  liveLabel: string | null;
  lastEvent: RecognitionView | null;
  lastFeedback: FeedbackView | null;
  banner: { kind: "pass" | "fail" | "info"; text: string } | null;
  framesSent: number;
}

export interface SessionOptions {
  baseUrl: string; // e.g. ws://localhost:8000
  mode: "learn" | "test";
  target: string;
  makeSocket: SocketFactory;
  frameRate?: number; // frames streamed per second
  reconnectDelayMs?: number;
  onChange?: (view: SessionView) => void;
}

export class PracticeSession {
  readonly view: SessionView = {
    status: "connecting",
    bars: {},
    liveLabel: null,
    lastEvent: null,
    lastFeedback: null,
    banner: null,
    framesSent: 0,
  };

  private socket: SocketLike | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;

  constructor(private readonly options: SessionOptions) {}

  private get frameRate(): number {
    return this.options.frameRate ?? 30;
  }

  url(): string {
    const { baseUrl, mode, target } = this.options;
    return `${baseUrl}/session?mode=${mode}&target=${encodeURIComponent(target)}`;
  }

  connect(): void {
    this.closedByUser = false;
    this.view.status = "connecting";
    this.emit();
    const socket = this.options.makeSocket(this.url());
    this.socket = socket;
    socket.onopen = () => {
      this.view.status = "live";
      this.emit();
    };
    socket.onmessage = (event) => this.handleMessage(event.data);
    socket.onclose = () => this.handleClose();
    socket.onerror = () => undefined; // close always follows
  }

  /** Stream frames produced by the callback until stop() or disconnect. */
  startStreaming(nextFrame: (t: number) => Record<string, unknown>): void {
    this.stopStreaming();
    this.timer = setInterval(() => {
      if (this.view.status !== "live" || !this.socket) return;
      const t = this.view.framesSent / this.frameRate;
      this.socket.send(JSON.stringify(nextFrame(t)));
      this.view.framesSent += 1;
      this.emit();
    }, 1000 / this.frameRate);
  }

  stopStreaming(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  finish(): void {
    this.socket?.send(JSON.stringify({ type: "finish" }));
  }

  close(): void {
    this.closedByUser = true;
    this.stopStreaming();
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.socket?.close();
    this.view.status = "closed";
    this.emit();
  }

  /** Reduce one server message into the view model, verbatim. */
  handleMessage(data: string): void {
    let message: Record<string, unknown>;
    try {
      message = JSON.parse(data) as Record<string, unknown>;
    } catch {
      return;
    }
    switch (message.type) {
      case "confidence": {
        this.view.bars = message.per_gesture as Record<string, number>;
        this.view.liveLabel = (message.label as string) ?? null;
        break;
      }
      case "event": {
        this.view.lastEvent = {
          signId: message.sign_id as string,
          confidence: message.confidence as number,
          keyposeTimestamps: message.keypose_timestamps as number[],
          translationMatch: message.translation_match as number[],
        };
        break;
      }
      case "feedback": {
        const feedback: FeedbackView = {
          target: message.target as string,
          recognized: message.recognized as string,
          score: message.score as number,
          passed: (message.passed as boolean | null) ?? null,
          deviation: message.deviation as number[],
        };
        this.view.lastFeedback = feedback;
        if (feedback.passed !== null) {
          this.view.banner = feedback.passed
            ? { kind: "pass", text: `PASS — recognized ${feedback.recognized}` }
            : { kind: "fail", text: `FAIL — recognized ${feedback.recognized}` };
        } else {
          this.view.banner = {
            kind: "info",
            text: `match score ${feedback.score.toFixed(2)} (${feedback.recognized})`,
          };
        }
        break;
      }
      case "error": {
        this.view.banner = {
          kind: "fail",
          text: `${message.error}: ${message.detail ?? ""}`,
        };
        break;
      }
      default:
        return;
    }
    this.emit();
  }

  private handleClose(): void {
    this.stopStreaming();
    if (this.closedByUser) return;
    this.view.status = "reconnecting";
    this.emit();
    const delay = this.options.reconnectDelayMs ?? 1000;
    this.reconnectTimer = setTimeout(() => this.connect(), delay);
  }

  private emit(): void {
    this.options.onChange?.(this.view);
  }
}
