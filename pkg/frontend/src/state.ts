// Console-local state. Device-stream commands (view angle, zoom, cursor
// mode) mutate only this state; they reach the server solely as the pose
// rider on pick requests.

import type { Snapshot, ViewPose } from './types.js';

export type InteractionMode = 'screen_center' | 'touch';
export type PopupPanel = 'none' | 'buttons' | 'actions' | 'details';
export type ConnectionStatus = 'connecting' | 'connected' | 'disconnected';

export const PITCH_MIN = -90;
export const PITCH_MAX = 90;
export const VFOV_MIN = 10;
export const VFOV_MAX = 120;

export interface ConsoleState {
  pose: ViewPose;
  mode: InteractionMode;
  selection: string | null;
  popup: PopupPanel;
  lastSnapshot: Snapshot | null;
  connection: ConnectionStatus;
  sessionId: string | null;
  degradedReason: string | null;
  toast: string | null;
}

export function initialState(mode: InteractionMode = 'screen_center'): ConsoleState {
  return {
    pose: { yaw: 0, pitch: 0, vfov: 60, viewport: [960, 540] },
    mode,
    selection: null,
    popup: 'none',
    lastSnapshot: null,
    connection: 'connecting',
    sessionId: null,
    degradedReason: null,
    toast: null,
  };
}

export function clampPose(pose: ViewPose): ViewPose {
  return {
    yaw: pose.yaw,
    pitch: Math.min(PITCH_MAX, Math.max(PITCH_MIN, pose.pitch)),
    vfov: Math.min(VFOV_MAX, Math.max(VFOV_MIN, pose.vfov)),
    viewport: pose.viewport,
  };
}

/** Device-local view rotation; never leaves the client by itself. */
export function rotatePose(state: ConsoleState, dyaw: number, dpitch: number): void {
  state.pose = clampPose({ ...state.pose, yaw: state.pose.yaw + dyaw, pitch: state.pose.pitch + dpitch });
}

/** Device-local zoom (vfov change). */
export function zoomPose(state: ConsoleState, dvfov: number): void {
  state.pose = clampPose({ ...state.pose, vfov: state.pose.vfov + dvfov });
}

export function applySnapshot(state: ConsoleState, snapshot: Snapshot): void {
  state.lastSnapshot = snapshot;
}

/** Selection change; the popup never survives without its object. */
export function applySelection(state: ConsoleState, selection: string | null): void {
  if (state.selection !== selection) {
    state.popup = selection === null ? 'none' : 'buttons';
  }
  state.selection = selection;
  assertPopupInvariant(state);
}

export function openPanel(state: ConsoleState, panel: 'actions' | 'details'): void {
  if (state.selection === null) {
    throw new Error('cannot open a popup without a selection');
  }
  state.popup = panel;
}

export function closePopup(state: ConsoleState): void {
  state.popup = 'none';
}

export function assertPopupInvariant(state: ConsoleState): void {
  if (state.popup !== 'none' && state.selection === null) {
    throw new Error('popup shown without a selection');
  }
}

export function popupButtonsVisible(state: ConsoleState): boolean {
  return state.selection !== null && state.popup !== 'none';
}
