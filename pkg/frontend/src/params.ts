/** Catalog of operator-adjustable parameters and how to present them.
 *
 * Paths are the engine's dotted parameter paths; values shown in the UI
 * are always the engine's echoes, so this catalog only decides grouping
 * and widget kind, never semantics. */

export const MODES = [
  "static_balance",
  "reach",
  "trunk_control",
  "sts",
  "gait_duration",
  "gait_phase",
] as const;

export const STRATEGIES = [
  "music_dissonance",
  "disturbance_tone",
  "ambulance_siren",
  "pitch_skew",
  "melody_degree",
  "track_mute",
  "drum_trigger",
  "cue_artifact",
  "music_stop",
] as const;

export const SCALES = ["major", "minor_nat", "pentatonic"] as const;
export const TRAJECTORY_SHAPES = [
  "linear",
  "diagonal",
  "circular",
  "square",
  "rhombic",
] as const;
export const CUES = ["bell", "wah"] as const;
export const TRACKS = [
  "kick", "snare", "hat", "perc", "bass", "chord", "melody", "pad",
] as const;

export interface ControlSpec {
  path: string;
  label: string;
  input: "number" | "select" | "text";
  min?: number;
  max?: number;
  step?: number;
  options?: readonly string[];
}

export interface SectionSpec {
  title: string;
  /** Only shown while this mode is active; always shown when omitted. */
  mode?: string;
  controls: ControlSpec[];
}

export interface PanelSpec {
  title: string;
  sections: SectionSpec[];
}

function num(path: string, label: string, min: number, max: number,
             step = 0.1): ControlSpec {
  return { path, label, input: "number", min, max, step };
}

function sel(path: string, label: string,
             options: readonly string[]): ControlSpec {
  return { path, label, input: "select", options };
}

function filterControls(signal: string): ControlSpec[] {
  return [
    num(`filters.${signal}.median_len`, "median length", 1, 31, 2),
    num(`filters.${signal}.lp_cutoff`, "low-pass cutoff Hz", 0.5, 49, 0.5),
  ];
}

function mappingControls(prefix: string): ControlSpec[] {
  return [
    num(`${prefix}.gamma`, "gamma", 0.05, 10, 0.05),
    num(`${prefix}.quant_levels`, "quantize levels", 0, 64, 1),
  ];
}

export const PANELS: PanelSpec[] = [
  {
    title: "Sensors",
    sections: [
      { title: "Tilt filter", controls: filterControls("tilt") },
      { title: "Jerk filter", controls: filterControls("jerk") },
      { title: "Step filter", controls: filterControls("step") },
      {
        title: "Console",
        controls: [num("snapshot_rate_hz", "snapshot rate Hz", 1, 60, 1)],
      },
    ],
  },
  {
    title: "Music",
    sections: [
      {
        title: "Song",
        controls: [
          { path: "song", label: "song", input: "text" },
          { path: "style", label: "style", input: "text" },
          num("tempo", "tempo BPM", 30, 240, 1),
          sel("scale", "scale", SCALES),
          num("root_octave", "root octave", 1, 7, 1),
        ],
      },
      {
        title: "Strategy sounds",
        controls: [
          num("strategy_params.tone_freq_hz", "tone Hz", 100, 12000, 50),
          num("strategy_params.siren_level_db", "siren level dB", -60, 0, 1),
          sel("strategy_params.mute_track", "muted track", TRACKS),
          num("strategy_params.threshold", "gate threshold", 0, 1, 0.05),
        ],
      },
    ],
  },
  {
    title: "Biofeedback",
    sections: [
      {
        title: "Static balance",
        mode: "static_balance",
        controls: [
          sel("static_balance.strategy", "strategy", STRATEGIES),
          num("static_balance.zone_fv.2", "zone 1 feedback", 0, 1, 0.01),
          num("static_balance.zone_fv.3", "zone 2 feedback", 0, 1, 0.01),
          num("static_balance.zone_fv.4", "zone 3 feedback", 0, 1, 0.01),
          ...mappingControls("static_balance.mapping"),
        ],
      },
      {
        title: "Reach",
        mode: "reach",
        controls: [
          sel("reach.axis", "axis", ["ml", "ap"]),
          num("reach.range_lo_deg", "range low deg", -60, 60, 1),
          num("reach.range_hi_deg", "range high deg", -60, 60, 1),
          num("reach.n_degrees", "scale degrees", 2, 24, 1),
          num("reach.rep_threshold_deg", "rep threshold deg", 0, 60, 1),
          num("reach.rep_rearm_deg", "rep re-arm deg", 0, 60, 1),
        ],
      },
      {
        title: "Trunk control",
        mode: "trunk_control",
        controls: [
          sel("trunk_control.feedback_kind", "feedback", ["anticipated", "zones"]),
          sel("trunk_control.strategy_ml", "ML strategy", STRATEGIES),
          sel("trunk_control.strategy_ap", "AP strategy", STRATEGIES),
          num("trunk_control.lead_beats", "lead beats", 0, 4, 0.25),
          num("trunk_control.sigmoid_k", "steepness /deg", 0.01, 100, 0.1),
          num("trunk_control.dead_zone_deg", "dead zone deg", 0, 30, 0.5),
          ...mappingControls("trunk_control.mapping"),
        ],
      },
      {
        title: "Sit-to-stand",
        mode: "sts",
        controls: [
          sel("sts.strategy", "strategy", STRATEGIES),
          num("sts.sit_threshold_deg", "sit threshold deg", 0, 90, 1),
          num("sts.stand_threshold_deg", "stand threshold deg", 0, 90, 1),
          num("sts.hysteresis_deg", "hysteresis deg", 0, 20, 0.5),
          sel("sts.sit_cue", "sit cue", CUES),
          sel("sts.stand_cue", "stand cue", CUES),
        ],
      },
      {
        title: "Gait duration",
        mode: "gait_duration",
        controls: [
          sel("gait_duration.strategy", "strategy", STRATEGIES),
          num("gait_duration.dead_zone_ms", "dead zone ms", 0, 1000, 10),
          num("gait_duration.beats_per_stride", "beats per stride", 1, 8, 1),
          ...mappingControls("gait_duration.mapping"),
        ],
      },
      {
        title: "Gait phase",
        mode: "gait_phase",
        controls: [sel("gait_phase.kick_foot", "kick foot", ["left", "right"])],
      },
      {
        title: "Zones",
        controls: [
          num("zones.center.ml", "center ML deg", -20, 20, 0.5),
          num("zones.center.ap", "center AP deg", -20, 20, 0.5),
          num("zones.radii.1.ml", "ring 1 ML deg", 0.1, 30, 0.5),
          num("zones.radii.1.ap", "ring 1 AP deg", 0.1, 30, 0.5),
          num("zones.radii.2.ml", "ring 2 ML deg", 0.1, 30, 0.5),
          num("zones.radii.2.ap", "ring 2 AP deg", 0.1, 30, 0.5),
          num("zones.radii.3.ml", "ring 3 ML deg", 0.1, 30, 0.5),
          num("zones.radii.3.ap", "ring 3 AP deg", 0.1, 30, 0.5),
          num("zones.rect_ml_bound", "lateral bound deg", 0.1, 60, 0.5),
        ],
      },
      {
        title: "Trajectory",
        mode: "trunk_control",
        controls: [
          sel("trajectory.shape", "shape", TRAJECTORY_SHAPES),
          num("trajectory.amp.ml", "amplitude ML deg", 0.1, 30, 0.5),
          num("trajectory.amp.ap", "amplitude AP deg", 0.1, 30, 0.5),
          num("trajectory.center.ml", "center ML deg", -20, 20, 0.5),
          num("trajectory.center.ap", "center AP deg", -20, 20, 0.5),
          num("trajectory.tempo_divisor", "beats per cycle", 1, 32, 1),
        ],
      },
    ],
  },
];

/** Paths the console re-reads on every (re)connect so a fresh page mirrors
 * the engine exactly. */
export function resyncPaths(): string[] {
  const paths = new Set<string>();
  for (const panel of PANELS) {
    for (const section of panel.sections) {
      for (const control of section.controls) paths.add(control.path);
    }
  }
  paths.add("mode");
  paths.add("standby");
  return [...paths];
}
