/** DOM wiring for the operator console.
 *
 * The page is three panels (sensors, music, biofeedback) around a status
 * header and the zone canvas. All state lives in the view model; this
 * module only renders it and forwards input events. */

import { ConsoleClient, defaultWsUrl } from "./client.js";
import { MODES, PANELS, type ControlSpec } from "./params.js";
import type { Snapshot } from "./protocol.js";
import { ConsoleViewModel } from "./viewmodel.js";
import {
  buildZoneScene,
  drawScene,
  zoneColor,
  zoneGeometryFrom,
} from "./zoneview.js";

const vm = new ConsoleViewModel();
const boundInputs: Array<() => void> = [];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

// -- header -----------------------------------------------------------------

function buildHeader(root: HTMLElement): void {
  const header = el("header", "topbar");
  header.append(el("h1", "", "sonimotion console"));

  const conn = el("span", "pill conn-pill", "offline");
  conn.id = "conn-pill";
  header.append(conn);

  const modeSel = el("select", "mode-select") as HTMLSelectElement;
  modeSel.id = "mode-select";
  for (const mode of MODES) {
    const opt = el("option", "", mode.replace(/_/g, " ")) as HTMLOptionElement;
    opt.value = mode;
    modeSel.append(opt);
  }
  modeSel.onchange = () => vm.setMode(modeSel.value);
  boundInputs.push(() => {
    if (document.activeElement !== modeSel) modeSel.value = vm.mode();
    modeSel.classList.toggle("pending", vm.isPending("mode"));
    modeSel.disabled = !vm.connected;
  });
  header.append(labelWrap("mode", modeSel));

  for (const action of ["play", "pause", "rewind"] as const) {
    const btn = el("button", "transport", action);
    btn.onclick = () => vm.transport(action);
    boundInputs.push(() => {
      btn.disabled = !vm.connected;
      if (action === "play") {
        btn.classList.toggle("active", vm.snapshot?.playing === true);
      }
    });
    header.append(btn);
  }

  const standby = el("button", "standby-btn", "standby");
  standby.id = "standby-btn";
  standby.onclick = () => vm.toggleStandby();
  boundInputs.push(() => {
    standby.disabled = !vm.connected;
    standby.classList.toggle("engaged", vm.standby());
    standby.classList.toggle("pending", vm.isPending("standby"));
    standby.textContent = vm.standby() ? "standby ON" : "standby";
  });
  header.append(standby);

  const calibrate = el("button", "", "calibrate");
  calibrate.onclick = () => vm.calibrate();
  boundInputs.push(() => {
    calibrate.disabled = !vm.connected;
  });
  header.append(calibrate);

  const log = el("a", "log-link", "download log") as HTMLAnchorElement;
  log.href = "/log";
  log.setAttribute("download", "session.csv");
  header.append(log);

  root.append(header);
}

function labelWrap(text: string, input: HTMLElement): HTMLElement {
  const wrap = el("label", "labeled");
  wrap.append(el("span", "lbl", text), input);
  return wrap;
}

// -- status strip --------------------------------------------------------------

function buildStatus(root: HTMLElement): void {
  const strip = el("section", "status-strip");

  const zoneBadge = el("span", "pill zone-badge", "zone –");
  const fvBar = el("div", "fv-bar");
  const fvFill = el("div", "fv-fill");
  fvBar.append(fvFill);
  const reps = el("span", "stat", "reps 0");
  const progress = el("progress") as HTMLProgressElement;
  progress.max = 1;
  const freeze = el("span", "pill freeze-pill", "feedback frozen");
  const err = el("span", "error-line");

  strip.append(
    labelWrap("feedback", fvBar),
    zoneBadge,
    reps,
    labelWrap("song", progress),
    freeze,
    err,
  );
  root.append(strip);

  boundInputs.push(() => {
    const snap = vm.snapshot;
    if (snap) {
      zoneBadge.textContent = snap.zone >= 0 ? `zone ${snap.zone}` : "zone –";
      zoneBadge.style.background = snap.zone >= 0 ? zoneColor(snap.zone) : "";
      fvFill.style.width = `${Math.round(snap.fv * 100)}%`;
      reps.textContent = `reps ${snap.rep_count}`;
      progress.value = snap.progress;
      freeze.style.visibility = snap.freeze ? "visible" : "hidden";
    }
    err.textContent = vm.lastError;
  });
}

// -- parameter panels --------------------------------------------------------

function bindParameterControl(spec: ControlSpec): HTMLElement {
  let input: HTMLInputElement | HTMLSelectElement;
  if (spec.input === "select") {
    input = el("select") as HTMLSelectElement;
    for (const option of spec.options ?? []) {
      const opt = el("option", "", option) as HTMLOptionElement;
      opt.value = option;
      input.append(opt);
    }
  } else {
    input = el("input") as HTMLInputElement;
    input.type = spec.input === "number" ? "number" : "text";
    if (spec.input === "number") {
      if (spec.min !== undefined) input.min = String(spec.min);
      if (spec.max !== undefined) input.max = String(spec.max);
      if (spec.step !== undefined) input.step = String(spec.step);
    }
  }
  input.onchange = () => {
    const raw = input.value;
    vm.setParam(spec.path, spec.input === "number" ? Number(raw) : raw);
  };

  const badge = el("span", "warn-badge", "!");
  badge.style.display = "none";

  boundInputs.push(() => {
    const value = vm.value(spec.path);
    if (document.activeElement !== input && value !== undefined) {
      input.value = String(value);
    }
    input.classList.toggle("pending", vm.isPending(spec.path));
    input.disabled = !vm.connected;
    const warning = vm.warning(spec.path);
    badge.style.display = warning ? "inline-block" : "none";
    badge.title = warning ?? "";
  });

  const row = el("div", "control-row");
  row.append(el("span", "lbl", spec.label), input, badge);
  return row;
}

function buildPanels(root: HTMLElement): void {
  const wrap = el("main", "panels");
  for (const panel of PANELS) {
    const column = el("section", "panel");
    column.append(el("h2", "", panel.title));
    if (panel.title === "Sensors") buildSensorStatus(column);
    for (const section of panel.sections) {
      const box = el("fieldset", "section-box");
      box.append(el("legend", "", section.title));
      for (const control of section.controls) {
        box.append(bindParameterControl(control));
      }
      if (section.mode !== undefined) {
        boundInputs.push(() => {
          box.style.display = vm.mode() === section.mode ? "" : "none";
        });
      }
      column.append(box);
    }
    wrap.append(column);
  }
  root.append(wrap);
}

function buildSensorStatus(column: HTMLElement): void {
  const box = el("fieldset", "section-box");
  box.append(el("legend", "", "Status"));
  const rows = new Map<string, HTMLElement>();
  for (const name of ["trunk", "left_foot", "right_foot"]) {
    const row = el("div", "sensor-row");
    row.append(
      el("span", "lbl", name.replace("_", " ")),
      el("span", "sensor-state", "—"),
    );
    rows.set(name, row);
    box.append(row);
  }
  const jitter = el("div", "sensor-row");
  jitter.append(el("span", "lbl", "loop jitter"), el("span", "sensor-state", "—"));
  box.append(jitter);
  const calib = el("div", "calib-note");
  box.append(calib);
  column.append(box);

  boundInputs.push(() => {
    const snap = vm.snapshot;
    for (const [name, row] of rows) {
      const state = row.querySelector(".sensor-state") as HTMLElement;
      const status = snap?.sensors[name];
      if (!status) {
        state.textContent = "—";
        state.className = "sensor-state";
      } else {
        const battery =
          status.battery !== null
            ? ` ${Math.round(status.battery * 100)}%`
            : "";
        state.textContent = (status.online ? "online" : "offline") + battery;
        state.className =
          "sensor-state " + (status.online ? "online" : "offline");
      }
    }
    const jitterState = jitter.querySelector(".sensor-state") as HTMLElement;
    jitterState.textContent = snap ? `${snap.jitter_ms.toFixed(1)} ms` : "—";
    calib.textContent = vm.calibration
      ? `gyro bias [${vm.calibration.gyroBias.map((b) => b.toFixed(2)).join(", ")}] deg/s`
      : "";
  });
}

// -- zone canvas --------------------------------------------------------------

function buildZoneCanvas(root: HTMLElement): void {
  const box = el("section", "zone-box");
  box.append(el("h2", "", "Balance view"));
  const canvas = el("canvas") as HTMLCanvasElement;
  canvas.width = 420;
  canvas.height = 420;
  box.append(canvas);
  const hint = el("p", "hint",
    "press S to toggle standby · marker color = engine-reported zone");
  box.append(hint);
  root.append(box);

  const ctx = canvas.getContext("2d");
  const redraw = () => {
    if (!ctx) return;
    const geom = zoneGeometryFrom((path) => vm.value(path));
    if (!geom) return;
    const scene = buildZoneScene(geom, vm.snapshot as Snapshot | null);
    drawScene(ctx, scene, geom, canvas.width, canvas.height);
  };
  vm.subscribe(redraw);
}

// -- boot ------------------------------------------------------------------------

function render(): void {
  const pill = document.getElementById("conn-pill");
  if (pill) {
    pill.textContent = vm.connected ? "connected" : "offline";
    pill.classList.toggle("up", vm.connected);
  }
  document.body.classList.toggle("disconnected", !vm.connected);
  for (const update of boundInputs) update();
}

function main(): void {
  const root = document.getElementById("app");
  if (!root) return;
  buildHeader(root);
  buildStatus(root);

  const split = el("div", "split");
  buildZoneCanvas(split);
  buildPanels(split);
  root.append(split);

  vm.subscribe(render);
  render();

  document.addEventListener("keydown", (event) => {
    const target = event.target as HTMLElement | null;
    const typing =
      target instanceof HTMLInputElement ||
      target instanceof HTMLSelectElement ||
      target instanceof HTMLTextAreaElement;
    if (!typing && (event.key === "s" || event.key === "S")) {
      event.preventDefault();
      vm.toggleStandby();
    }
  });

  new ConsoleClient(defaultWsUrl(), vm).start();
}

main();
