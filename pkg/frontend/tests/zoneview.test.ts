import { describe, expect, it } from "vitest";

import type { ParamValue, Snapshot } from "../src/protocol.js";
import {
  buildZoneScene,
  zoneColor,
  zoneGeometryFrom,
  ZONE_PALETTE,
  type ZoneGeometry,
} from "../src/zoneview.js";

const GEOMETRY: ZoneGeometry = {
  centerMl: 0,
  centerAp: 0,
  radii: [
    [2, 2],
    [4, 4],
    [6, 6],
  ],
  rectMlBound: 10,
};

function makeSnapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    kind: "snapshot",
    t_ms: 0,
    mode: "static_balance",
    standby: false,
    playing: true,
    tempo: 120,
    tilt_ml: 0,
    tilt_ap: 0,
    jerk_sq: 0,
    zone: 0,
    fv: 0,
    freeze: false,
    trajectory: null,
    rep_count: 0,
    progress: 0,
    sensors: {},
    jitter_ms: 0,
    ...overrides,
  };
}

describe("zoneGeometryFrom", () => {
  it("assembles geometry once every layout parameter has echoed", () => {
    const values = new Map<string, ParamValue>([
      ["zones.center.ml", 1],
      ["zones.center.ap", -1],
      ["zones.radii.1.ml", 2],
      ["zones.radii.1.ap", 2.5],
      ["zones.radii.2.ml", 4],
      ["zones.radii.2.ap", 4.5],
      ["zones.radii.3.ml", 6],
      ["zones.radii.3.ap", 6.5],
      ["zones.rect_ml_bound", 12],
    ]);
    const geom = zoneGeometryFrom((p) => values.get(p));
    expect(geom).not.toBeNull();
    expect(geom!.centerMl).toBe(1);
    expect(geom!.radii[2]).toEqual([6, 6.5]);
    expect(geom!.rectMlBound).toBe(12);

    values.delete("zones.radii.2.ap");
    expect(zoneGeometryFrom((p) => values.get(p))).toBeNull();
  });
});

describe("buildZoneScene", () => {
  it("places a centered marker inside the innermost ring", () => {
    const scene = buildZoneScene(GEOMETRY, makeSnapshot());
    const marker = scene.shapes.find((s) => s.kind === "marker");
    expect(marker).toBeDefined();
    if (marker?.kind !== "marker") throw new Error("unreachable");

    const inner = scene.shapes
      .filter((s) => s.kind === "ellipse")
      .at(-1); // innermost is pushed last for back-to-front painting
    if (inner?.kind !== "ellipse") throw new Error("no ellipse");
    expect(inner.rMl).toBe(2);
    const norm =
      ((marker.ml - inner.ml) / inner.rMl) ** 2 +
      ((marker.ap - inner.ap) / inner.rAp) ** 2;
    expect(norm).toBeLessThanOrEqual(1);
  });

  it("colors the marker by the engine-reported zone, not local geometry", () => {
    // tilt is dead center, but the engine says zone 5: the engine wins
    const scene = buildZoneScene(
      GEOMETRY,
      makeSnapshot({ tilt_ml: 0, tilt_ap: 0, zone: 5 }),
    );
    const marker = scene.shapes.find((s) => s.kind === "marker");
    if (marker?.kind !== "marker") throw new Error("no marker");
    expect(marker.zone).toBe(5);
    expect(zoneColor(marker.zone)).toBe(ZONE_PALETTE[5]);
  });

  it("draws the lateral bands at the configured bound", () => {
    const scene = buildZoneScene(GEOMETRY, null);
    const bands = scene.shapes.filter((s) => s.kind === "band");
    expect(bands).toHaveLength(2);
    const edges = bands.map((b) => (b.kind === "band" ? b.mlEdge : NaN));
    expect(edges).toContain(-10);
    expect(edges).toContain(10);
  });

  it("reflects updated radii immediately", () => {
    const grown: ZoneGeometry = {
      ...GEOMETRY,
      radii: [
        [3, 3],
        [5, 5],
        [8, 8],
      ],
      rectMlBound: 12,
    };
    const scene = buildZoneScene(grown, null);
    const radiiMl = scene.shapes
      .filter((s) => s.kind === "ellipse")
      .map((s) => (s.kind === "ellipse" ? s.rMl : NaN));
    expect(radiiMl).toEqual([8, 5, 3]);
  });

  it("shows the moving target only in trajectory mode", () => {
    const inTrunkControl = buildZoneScene(
      GEOMETRY,
      makeSnapshot({ mode: "trunk_control", trajectory: [3, 1] }),
    );
    const target = inTrunkControl.shapes.find((s) => s.kind === "target");
    expect(target).toMatchObject({ ml: 3, ap: 1 });

    const elsewhere = buildZoneScene(
      GEOMETRY,
      makeSnapshot({ mode: "static_balance", trajectory: [3, 1] }),
    );
    expect(elsewhere.shapes.some((s) => s.kind === "target")).toBe(false);
  });

  it("widens the view so an out-of-band marker stays visible", () => {
    const scene = buildZoneScene(
      GEOMETRY,
      makeSnapshot({ tilt_ml: 25, tilt_ap: 0, zone: 5 }),
    );
    expect(scene.extentDeg).toBeGreaterThanOrEqual(25);
  });
});
