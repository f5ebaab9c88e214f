/** Zone layout rendering: the balance zones as concentric ellipses inside
 * a lateral band, with the live trunk-tilt marker and (in trajectory
 * modes) the moving target.
 *
 * Scene construction is pure so it can be tested headless; only
 * drawScene touches a canvas. The marker's zone always comes from the
 * engine snapshot — the view never re-classifies the position itself. */

import type { ParamValue, Snapshot } from "./protocol.js";

export interface ZoneGeometry {
  centerMl: number;
  centerAp: number;
  /** Three (ml, ap) semi-axis pairs, innermost first. */
  radii: Array<[number, number]>;
  rectMlBound: number;
}

export const ZONE_PALETTE = [
  "#39c06f", // 0: on target
  "#a7c957", // 1
  "#e9c46a", // 2
  "#e76f51", // 3: outside the rings
  "#b56fe7", // 4: far left
  "#6f8ae7", // 5: far right
] as const;

export function zoneColor(zone: number): string {
  return ZONE_PALETTE[zone] ?? "#8a8f98";
}

/** Assemble the geometry from echoed parameter values; null until all
 * ten layout parameters have arrived. */
export function zoneGeometryFrom(
  value: (path: string) => ParamValue | undefined,
): ZoneGeometry | null {
  const needed = [
    "zones.center.ml", "zones.center.ap",
    "zones.radii.1.ml", "zones.radii.1.ap",
    "zones.radii.2.ml", "zones.radii.2.ap",
    "zones.radii.3.ml", "zones.radii.3.ap",
    "zones.rect_ml_bound",
  ];
  const got: number[] = [];
  for (const path of needed) {
    const v = value(path);
    if (typeof v !== "number") return null;
    got.push(v);
  }
  return {
    centerMl: got[0],
    centerAp: got[1],
    radii: [
      [got[2], got[3]],
      [got[4], got[5]],
      [got[6], got[7]],
    ],
    rectMlBound: got[8],
  };
}

export type SceneShape =
  | {
      kind: "ellipse";
      ml: number;
      ap: number;
      rMl: number;
      rAp: number;
      zone: number;
    }
  | {
      kind: "band";
      side: "left" | "right";
      mlEdge: number;
      zone: number;
    }
  | { kind: "marker"; ml: number; ap: number; zone: number; frozen: boolean }
  | { kind: "target"; ml: number; ap: number };

export interface ZoneScene {
  shapes: SceneShape[];
  /** Half-width of the square view in degrees, centered on the layout. */
  extentDeg: number;
}

export function buildZoneScene(
  geom: ZoneGeometry,
  snapshot: Snapshot | null,
): ZoneScene {
  const outer = geom.radii[geom.radii.length - 1];
  let extentDeg = Math.max(geom.rectMlBound * 1.25, outer[1] * 1.8, 10);

  const shapes: SceneShape[] = [
    { kind: "band", side: "left", mlEdge: geom.centerMl - geom.rectMlBound, zone: 4 },
    { kind: "band", side: "right", mlEdge: geom.centerMl + geom.rectMlBound, zone: 5 },
  ];
  // outermost first so the painter can fill back-to-front
  for (let i = geom.radii.length - 1; i >= 0; i--) {
    shapes.push({
      kind: "ellipse",
      ml: geom.centerMl,
      ap: geom.centerAp,
      rMl: geom.radii[i][0],
      rAp: geom.radii[i][1],
      zone: i,
    });
  }
  if (snapshot !== null) {
    if (snapshot.trajectory !== null && snapshot.mode === "trunk_control") {
      shapes.push({
        kind: "target",
        ml: snapshot.trajectory[0],
        ap: snapshot.trajectory[1],
      });
    }
    shapes.push({
      kind: "marker",
      ml: snapshot.tilt_ml,
      ap: snapshot.tilt_ap,
      zone: snapshot.zone,
      frozen: snapshot.freeze,
    });
    const r = Math.hypot(snapshot.tilt_ml - geom.centerMl,
                         snapshot.tilt_ap - geom.centerAp);
    extentDeg = Math.max(extentDeg, r * 1.1);
  }
  return { shapes, extentDeg };
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  scene: ZoneScene,
  geom: ZoneGeometry,
  width: number,
  height: number,
): void {
  const half = Math.min(width, height) / 2;
  const scale = half / scene.extentDeg;
  const toX = (ml: number) => width / 2 + (ml - geom.centerMl) * scale;
  const toY = (ap: number) => height / 2 - (ap - geom.centerAp) * scale;

  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#14171c";
  ctx.fillRect(0, 0, width, height);

  for (const shape of scene.shapes) {
    if (shape.kind === "band") {
      ctx.fillStyle = zoneColor(shape.zone) + "2e";
      const edge = toX(shape.mlEdge);
      if (shape.side === "left") ctx.fillRect(0, 0, edge, height);
      else ctx.fillRect(edge, 0, width - edge, height);
      ctx.strokeStyle = zoneColor(shape.zone);
      ctx.setLineDash([6, 4]);
      ctx.beginPath();
      ctx.moveTo(edge, 0);
      ctx.lineTo(edge, height);
      ctx.stroke();
      ctx.setLineDash([]);
    } else if (shape.kind === "ellipse") {
      ctx.fillStyle = zoneColor(shape.zone) + "33";
      ctx.strokeStyle = zoneColor(shape.zone);
      ctx.beginPath();
      ctx.ellipse(toX(shape.ml), toY(shape.ap), shape.rMl * scale,
                  shape.rAp * scale, 0, 0, 2 * Math.PI);
      ctx.fill();
      ctx.stroke();
    } else if (shape.kind === "target") {
      ctx.strokeStyle = "#e8e8e8";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(toX(shape.ml), toY(shape.ap), 9, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.lineWidth = 1;
    } else {
      ctx.fillStyle = shape.frozen ? "#8a8f98" : zoneColor(shape.zone);
      ctx.strokeStyle = "#ffffff";
      ctx.beginPath();
      ctx.arc(toX(shape.ml), toY(shape.ap), 7, 0, 2 * Math.PI);
      ctx.fill();
      ctx.stroke();
    }
  }

  // axis cross through the layout center
  ctx.strokeStyle = "#3a3f47";
  ctx.beginPath();
  ctx.moveTo(toX(geom.centerMl), 0);
  ctx.lineTo(toX(geom.centerMl), height);
  ctx.moveTo(0, toY(geom.centerAp));
  ctx.lineTo(width, toY(geom.centerAp));
  ctx.stroke();
}
