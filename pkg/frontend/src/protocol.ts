/** Wire protocol types: one JSON object per WebSocket text frame. */

export type Scheme = "ordinal" | "categorical";

export interface EncodingToken {
  scheme: Scheme;
  level: number;
}

export type DirectiveKind =
  | "spinner_on"
  | "spinner_off"
  | "render_response"
  | "replace_in_place"
  | "evict"
  | "cancel"
  | "recolor"
  | "hold"
  | "release";

export interface WireDirective {
  kind: DirectiveKind;
  req_id: number;
  slot: number;
  at: number;
  encoding: EncodingToken | null;
  /** facet name; present on directives tied to a known request */
  target?: string;
  /** data points, present on render kinds so the client can draw */
  series?: [number, number][];
}

export interface PolicyConfig {
  kind: "blocking" | "naive" | "cumulative" | "multiples" | "overlay" | "animation";
  cap?: number | null;
  scheme?: Scheme;
  min_dwell?: number;
  in_order?: boolean;
}

export interface SessionConfigMsg {
  policy: PolicyConfig;
  latency: { kind: string; d?: number; lo?: number; hi?: number };
  task: { kind: string; cutoff?: number | null };
  seed: number;
}

export type ClientMessage =
  | { type: "hello"; config: SessionConfigMsg }
  | { type: "interact"; target: string; client_time: number }
  | { type: "submit_answer"; answer: boolean | string };

export type ServerMessage =
  | { type: "config_ack"; task_question: string }
  | { type: "render"; directive: WireDirective }
  | { type: "summary"; metrics: Record<string, unknown>; correct: boolean }
  | { type: "error"; code: string; detail: string };
