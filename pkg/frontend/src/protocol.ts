/** Wire types for the engine's control WebSocket (one JSON object per
 * message). Mirrors the schema documented in the repository README. */

export type ParamValue = number | string | boolean;

export interface SetParamRequest {
  kind: "set_param";
  path: string;
  value: ParamValue;
  request_id: number;
}

export interface GetParamRequest {
  kind: "get_param";
  path: string;
  request_id: number;
}

export interface SetModeRequest {
  kind: "set_mode";
  value: string;
  request_id: number;
}

export type TransportAction = "play" | "pause" | "rewind";

export interface TransportRequest {
  kind: "transport";
  value: TransportAction;
  request_id: number;
}

export interface StandbyRequest {
  kind: "standby";
  value: boolean;
  request_id: number;
}

export interface SnapshotRequest {
  kind: "snapshot_request";
  request_id: number;
}

export interface CalibrateRequest {
  kind: "calibrate";
  request_id: number;
}

export type Request =
  | SetParamRequest
  | GetParamRequest
  | SetModeRequest
  | TransportRequest
  | StandbyRequest
  | SnapshotRequest
  | CalibrateRequest;

export interface Reply {
  kind: "reply";
  request_id?: number;
  ok: boolean;
  path?: string;
  value?: unknown;
  clamped?: boolean;
  warning?: string;
}

export interface ErrorReply {
  kind: "error";
  request_id?: number | null;
  error: string;
  detail: string;
}

export interface SensorStatus {
  online: boolean;
  battery: number | null;
}

export interface Snapshot {
  kind: "snapshot";
  request_id?: number;
  t_ms: number;
  mode: string;
  standby: boolean;
  playing: boolean;
  tempo: number;
  tilt_ml: number;
  tilt_ap: number;
  jerk_sq: number;
  zone: number;
  fv: number;
  freeze: boolean;
  trajectory: [number, number] | null;
  rep_count: number;
  progress: number;
  sensors: Record<string, SensorStatus>;
  jitter_ms: number;
}

export type ServerMessage = Reply | ErrorReply | Snapshot;

/** Decode one inbound frame; null for anything that isn't a known message. */
export function parseServerMessage(text: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const kind = (data as { kind?: unknown }).kind;
  if (kind === "reply" || kind === "error" || kind === "snapshot") {
    return data as ServerMessage;
  }
  return null;
}
