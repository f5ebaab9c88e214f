/** Console view model: the single mutable state behind the UI.
 *
 * Invariant: every value this model exposes for display came from the
 * engine — either a reply echo or a pushed snapshot. A local edit only
 * marks the control pending until its echo (or error) arrives, so the
 * screen can never show state the engine doesn't have. */

import type {
  ParamValue,
  Request,
  ServerMessage,
  Snapshot,
  TransportAction,
} from "./protocol.js";
import { resyncPaths } from "./params.js";

export type SendFn = (req: Request) => void;

/** A request before its id is assigned; Omit must distribute over the
 * union so per-kind fields like path/value survive. */
type RequestBody = Request extends infer R
  ? R extends Request
    ? Omit<R, "request_id">
    : never
  : never;

interface Inflight {
  kind: Request["kind"];
  path?: string;
}

export class ConsoleViewModel {
  connected = false;
  snapshot: Snapshot | null = null;
  lastError = "";
  calibration: { gyroBias: number[]; accBias: number[] } | null = null;

  private engineValues = new Map<string, ParamValue>();
  private pendingByPath = new Map<string, number>();
  private warningsByPath = new Map<string, string>();
  private inflight = new Map<number, Inflight>();
  private nextRequestId = 1;
  private sendFn: SendFn;
  private listeners: Array<() => void> = [];

  constructor(send: SendFn = () => {}) {
    this.sendFn = send;
  }

  attachSender(send: SendFn): void {
    this.sendFn = send;
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  // -- connection ------------------------------------------------------------

  connectionChanged(up: boolean): void {
    this.connected = up;
    this.pendingByPath.clear();
    this.inflight.clear();
    if (up) {
      this.warningsByPath.clear();
      this.lastError = "";
      this.resync();
    }
    this.notify();
  }

  /** Rebuild the whole view from the engine: one snapshot plus a read of
   * every cataloged parameter. Makes page reloads stateless. */
  private resync(): void {
    this.request({ kind: "snapshot_request" });
    for (const path of resyncPaths()) {
      this.request({ kind: "get_param", path });
    }
  }

  // -- outbound --------------------------------------------------------------

  private request(partial: RequestBody): number {
    const id = this.nextRequestId++;
    const req = { ...partial, request_id: id } as Request;
    this.inflight.set(id, {
      kind: req.kind,
      path: "path" in req ? req.path : undefined,
    });
    this.sendFn(req);
    return id;
  }

  setParam(path: string, value: ParamValue): void {
    if (!this.connected) return;
    this.warningsByPath.delete(path);
    const id = this.request({ kind: "set_param", path, value });
    this.pendingByPath.set(path, id);
    this.notify();
  }

  setMode(mode: string): void {
    if (!this.connected) return;
    const id = this.request({ kind: "set_mode", value: mode });
    this.pendingByPath.set("mode", id);
    this.notify();
  }

  transport(action: TransportAction): void {
    if (!this.connected) return;
    this.request({ kind: "transport", value: action });
  }

  setStandby(value: boolean): void {
    if (!this.connected) return;
    const id = this.request({ kind: "standby", value });
    this.pendingByPath.set("standby", id);
    this.notify();
  }

  toggleStandby(): void {
    this.setStandby(!this.standby());
  }

  calibrate(): void {
    if (!this.connected) return;
    this.request({ kind: "calibrate" });
  }

  requestSnapshot(): void {
    if (!this.connected) return;
    this.request({ kind: "snapshot_request" });
  }

  // -- accessors ---------------------------------------------------------------

  value(path: string): ParamValue | undefined {
    return this.engineValues.get(path);
  }

  isPending(path: string): boolean {
    return this.pendingByPath.has(path);
  }

  warning(path: string): string | undefined {
    return this.warningsByPath.get(path);
  }

  mode(): string {
    return String(this.engineValues.get("mode") ?? this.snapshot?.mode ?? "");
  }

  standby(): boolean {
    const echoed = this.engineValues.get("standby");
    if (typeof echoed === "boolean") return echoed;
    return this.snapshot?.standby ?? false;
  }

  zone(): number {
    return this.snapshot?.zone ?? -1;
  }

  // -- inbound ---------------------------------------------------------------

  handleMessage(msg: ServerMessage): void {
    if (msg.kind === "snapshot") {
      this.applySnapshot(msg);
    } else if (msg.kind === "reply") {
      this.applyReply(msg);
    } else {
      this.applyError(msg);
    }
    this.notify();
  }

  private applySnapshot(snap: Snapshot): void {
    this.snapshot = snap;
    if (typeof snap.request_id === "number") {
      this.inflight.delete(snap.request_id);
    }
    // Live fields double as engine echoes for their bound controls, but a
    // set still in flight keeps its pending marker until its own reply.
    this.engineValues.set("tempo", snap.tempo);
    this.engineValues.set("mode", snap.mode);
    this.engineValues.set("standby", snap.standby);
  }

  private applyReply(msg: {
    request_id?: number;
    path?: string;
    value?: unknown;
    clamped?: boolean;
    warning?: string;
  }): void {
    const id = msg.request_id;
    const req = typeof id === "number" ? this.inflight.get(id) : undefined;
    if (typeof id === "number") this.inflight.delete(id);
    if (!req) return;

    switch (req.kind) {
      case "set_param":
      case "get_param": {
        const path = req.path ?? "";
        if (isParamValue(msg.value)) this.engineValues.set(path, msg.value);
        if (this.pendingByPath.get(path) === id) {
          this.pendingByPath.delete(path);
        }
        if (req.kind === "set_param" && msg.clamped) {
          this.warningsByPath.set(path, msg.warning ?? "value clamped");
        }
        break;
      }
      case "set_mode":
        if (typeof msg.value === "string") {
          this.engineValues.set("mode", msg.value);
        }
        if (this.pendingByPath.get("mode") === id) {
          this.pendingByPath.delete("mode");
        }
        break;
      case "standby":
        if (typeof msg.value === "boolean") {
          this.engineValues.set("standby", msg.value);
        }
        if (this.pendingByPath.get("standby") === id) {
          this.pendingByPath.delete("standby");
        }
        break;
      case "calibrate": {
        const v = msg.value as { gyro_bias?: number[]; acc_bias?: number[] };
        this.calibration = {
          gyroBias: v?.gyro_bias ?? [],
          accBias: v?.acc_bias ?? [],
        };
        break;
      }
      case "transport":
      case "snapshot_request":
        break;
    }
  }

  private applyError(msg: {
    request_id?: number | null;
    error: string;
    detail: string;
  }): void {
    this.lastError = `${msg.error}: ${msg.detail}`;
    const id = msg.request_id;
    const req = typeof id === "number" ? this.inflight.get(id) : undefined;
    if (typeof id === "number") this.inflight.delete(id);
    if (!req) return;
    const path =
      req.path ?? (req.kind === "set_mode" ? "mode"
        : req.kind === "standby" ? "standby" : undefined);
    if (path !== undefined) {
      if (this.pendingByPath.get(path) === id) {
        this.pendingByPath.delete(path);
      }
      this.warningsByPath.set(path, this.lastError);
    }
  }
}

function isParamValue(v: unknown): v is ParamValue {
  return (
    typeof v === "number" || typeof v === "string" || typeof v === "boolean"
  );
}
