import { describe, expect, it } from "vitest";

import type { Request, ServerMessage, Snapshot } from "../src/protocol.js";
import { ConsoleViewModel } from "../src/viewmodel.js";

function makeSnapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    kind: "snapshot",
    t_ms: 1000,
    mode: "static_balance",
    standby: false,
    playing: true,
    tempo: 120,
    tilt_ml: 0.5,
    tilt_ap: -0.2,
    jerk_sq: 0.01,
    zone: 1,
    fv: 0.33,
    freeze: false,
    trajectory: null,
    rep_count: 2,
    progress: 0.4,
    sensors: {
      trunk: { online: true, battery: 0.9 },
      left_foot: { online: false, battery: null },
      right_foot: { online: false, battery: null },
    },
    jitter_ms: 0.1,
    ...overrides,
  };
}

/** A connected view model plus the requests it has sent. */
function connectedVm(): { vm: ConsoleViewModel; sent: Request[] } {
  const sent: Request[] = [];
  const vm = new ConsoleViewModel((req) => sent.push(req));
  vm.connectionChanged(true);
  sent.length = 0; // drop the resync burst
  return { vm, sent };
}

function replyTo(vm: ConsoleViewModel, req: Request, fields: object): void {
  vm.handleMessage({
    kind: "reply",
    request_id: req.request_id,
    ok: true,
    ...fields,
  } as ServerMessage);
}

describe("parameter echo loop", () => {
  it("shows the engine echo, never the local edit", () => {
    const { vm, sent } = connectedVm();

    vm.setParam("static_balance.mapping.gamma", 2.5);
    expect(sent).toHaveLength(1);
    expect(sent[0]).toMatchObject({
      kind: "set_param",
      path: "static_balance.mapping.gamma",
      value: 2.5,
    });

    // before the echo: still pending, nothing displayed as applied
    expect(vm.isPending("static_balance.mapping.gamma")).toBe(true);
    expect(vm.value("static_balance.mapping.gamma")).toBeUndefined();

    replyTo(vm, sent[0], {
      path: "static_balance.mapping.gamma",
      value: 2.5,
      clamped: false,
    });
    expect(vm.isPending("static_balance.mapping.gamma")).toBe(false);
    expect(vm.value("static_balance.mapping.gamma")).toBe(2.5);
  });

  it("keeps the newest set pending when an older echo arrives late", () => {
    const { vm, sent } = connectedVm();
    vm.setParam("tempo", 100);
    vm.setParam("tempo", 110);
    expect(sent).toHaveLength(2);

    replyTo(vm, sent[0], { path: "tempo", value: 100 });
    // the engine has acknowledged 100, but 110 is still in flight
    expect(vm.value("tempo")).toBe(100);
    expect(vm.isPending("tempo")).toBe(true);

    replyTo(vm, sent[1], { path: "tempo", value: 110 });
    expect(vm.value("tempo")).toBe(110);
    expect(vm.isPending("tempo")).toBe(false);
  });

  it("surfaces clamp warnings from the engine", () => {
    const { vm, sent } = connectedVm();
    vm.setParam("tempo", 999);
    replyTo(vm, sent[0], {
      path: "tempo",
      value: 240,
      clamped: true,
      warning: "value out of range; clamped to 240.0",
    });
    expect(vm.value("tempo")).toBe(240);
    expect(vm.warning("tempo")).toContain("clamped");
    expect(vm.isPending("tempo")).toBe(false);

    // the next successful set clears the badge
    vm.setParam("tempo", 120);
    expect(vm.warning("tempo")).toBeUndefined();
  });

  it("clears pending and surfaces errors per control", () => {
    const { vm, sent } = connectedVm();
    vm.setParam("no.such.path", 1);
    vm.handleMessage({
      kind: "error",
      request_id: sent[0].request_id,
      error: "UnknownPath",
      detail: "no.such.path",
    });
    expect(vm.isPending("no.such.path")).toBe(false);
    expect(vm.warning("no.such.path")).toContain("UnknownPath");
    expect(vm.lastError).toContain("UnknownPath");
    expect(vm.value("no.such.path")).toBeUndefined();
  });
});

describe("snapshots", () => {
  it("mirrors live fields and reports the engine zone verbatim", () => {
    const { vm } = connectedVm();
    vm.handleMessage(makeSnapshot({ zone: 5, tempo: 90, mode: "reach" }));
    expect(vm.zone()).toBe(5);
    expect(vm.value("tempo")).toBe(90);
    expect(vm.mode()).toBe("reach");
    expect(vm.snapshot?.fv).toBeCloseTo(0.33);
  });

  it("reconstructs the full status view from a single snapshot", () => {
    const vm = new ConsoleViewModel();
    vm.connectionChanged(true);
    vm.handleMessage(makeSnapshot());
    expect(vm.standby()).toBe(false);
    expect(vm.snapshot?.rep_count).toBe(2);
    expect(vm.snapshot?.sensors.trunk.online).toBe(true);
    expect(vm.snapshot?.progress).toBeCloseTo(0.4);
  });

  it("does not clear a pending set when a snapshot races it", () => {
    const { vm, sent } = connectedVm();
    vm.setParam("tempo", 150);
    vm.handleMessage(makeSnapshot({ tempo: 120 }));
    // engine truth so far is 120; the set is still awaiting its echo
    expect(vm.value("tempo")).toBe(120);
    expect(vm.isPending("tempo")).toBe(true);
    replyTo(vm, sent[0], { path: "tempo", value: 150 });
    expect(vm.value("tempo")).toBe(150);
    expect(vm.isPending("tempo")).toBe(false);
  });
});

describe("standby", () => {
  it("toggles against the engine-echoed state", () => {
    const { vm, sent } = connectedVm();
    vm.handleMessage(makeSnapshot({ standby: false }));

    vm.toggleStandby();
    expect(sent.at(-1)).toMatchObject({ kind: "standby", value: true });
    expect(vm.isPending("standby")).toBe(true);
    expect(vm.standby()).toBe(false); // not yet acknowledged

    replyTo(vm, sent.at(-1)!, { value: true });
    expect(vm.standby()).toBe(true);
    expect(vm.isPending("standby")).toBe(false);

    vm.toggleStandby();
    expect(sent.at(-1)).toMatchObject({ kind: "standby", value: false });
  });
});

describe("connection lifecycle", () => {
  it("ignores input while disconnected", () => {
    const sent: Request[] = [];
    const vm = new ConsoleViewModel((req) => sent.push(req));
    vm.setParam("tempo", 100);
    vm.transport("play");
    vm.toggleStandby();
    expect(sent).toHaveLength(0);
    expect(vm.connected).toBe(false);
  });

  it("drops pending markers on disconnect and resyncs on reconnect", () => {
    const { vm, sent } = connectedVm();
    vm.setParam("tempo", 100);
    expect(vm.isPending("tempo")).toBe(true);

    vm.connectionChanged(false);
    expect(vm.isPending("tempo")).toBe(false);

    sent.length = 0;
    vm.connectionChanged(true);
    const kinds = sent.map((r) => r.kind);
    expect(kinds).toContain("snapshot_request");
    expect(kinds).toContain("get_param");
    const paths = sent
      .filter((r) => r.kind === "get_param")
      .map((r) => (r as { path: string }).path);
    expect(paths).toContain("tempo");
    expect(paths).toContain("zones.rect_ml_bound");
    expect(paths).toContain("mode");
  });

  it("stores calibration results from the reply", () => {
    const { vm, sent } = connectedVm();
    vm.calibrate();
    replyTo(vm, sent[0], {
      value: { gyro_bias: [0.1, 0.0, -0.1], acc_bias: [0, 0, 0.01] },
    });
    expect(vm.calibration?.gyroBias).toEqual([0.1, 0.0, -0.1]);
    expect(vm.calibration?.accBias).toEqual([0, 0, 0.01]);
  });
});
