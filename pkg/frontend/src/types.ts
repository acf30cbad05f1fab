/**
 * Service payload types.
 *
 * These mirror the JSON the scheduling service returns; the UI never
 * computes scheduling facts itself, it only rearranges these fields.
 */

export type IntervalPair = [number, number];

export type Outcome = "scheduled" | "failed_phase1" | "failed_phase2";

export interface SessionCreated {
  session_id: string;
  revision: number;
  scheduled: string[];
  failed: string[];
}

export interface StepSummary {
  step: number;
  activity: string;
  outcome: Outcome;
  start?: number;
  reasons?: string[];
}

export interface GeneratedEntry {
  id: string;
  kind: string;
  start: number;
  end: number;
  power: number;
  instrument: string | null;
  parent: string;
}

export interface PlacedEntry {
  activity: string;
  start: number;
  end: number;
  generated: GeneratedEntry[];
}

export interface ScheduleDoc {
  format_version: number;
  plan_bounds: IntervalPair;
  steps: StepSummary[];
  placed: PlacedEntry[];
  awake: IntervalPair[];
  scheduled: string[];
  failed: string[];
  soc_profile: [number, number][];
  power_profile: [number, number][];
}

export interface StepView {
  revision: number;
  step: number;
  total_steps: number;
  output_schedule: PlacedEntry[];
  failed: string[];
  yet_to_schedule: string[];
  awake: IntervalPair[];
  soc_profile: [number, number][];
  power_profile: [number, number][];
}

export interface ActivityView {
  revision: number;
  activity: Record<string, unknown> & { id: string; priority: number; duration: number };
  step: number;
  outcome: Outcome;
  start: number | null;
  valid_intervals: Record<string, IntervalPair[]>;
  final_intervals: IntervalPair[];
}

export interface ConflictEntity {
  kind: string;
  name: string;
  activities: string[];
}

export interface ExplanationDoc {
  activity: string;
  phase: 1 | 2;
  failure_step: number;
  gated: {
    dependencies_kept: string[];
    dependencies_dropped: string[];
    state_requirements_kept: [string, string][];
    state_requirements_dropped: [string, string][];
  };
  valid_intervals: Record<string, IntervalPair[]>;
  final_intervals: IntervalPair[];
  partial_schedule: {
    placed: { activity: string; start: number; end: number }[];
    failed: string[];
    awake: IntervalPair[];
  };
  failing_subsets: string[][];
  conflicts: { subset: string[]; entities: ConflictEntity[] }[];
  reasons: { time: number; reason: string; detail: string }[];
  reason_set: string[];
  notes: string[];
}

export interface EnergyView {
  revision: number;
  t: number;
  consumers: { id: string; watt_hours: number }[];
}

export interface PowerView {
  revision: number;
  t: number;
  users: { id: string; watts: number }[];
}

export interface PatchResult {
  session_id: string;
  revision: number;
  activity: string;
  outcome: Outcome;
  start: number | null;
  scheduled: string[];
  failed: string[];
}

export interface ApiError {
  error: string;
  errors?: string[];
}
