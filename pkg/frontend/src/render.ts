// Pure rendering: console state + view payload in, a display list out.
// The browser executes the list on a canvas; tests inspect it directly.

import { CROSSHAIR_COLOR, SeverityPalette, cssColor } from './colors.js';
import type { ConsoleState } from './state.js';
import { popupButtonsVisible } from './state.js';
import type { ViewPayload } from './types.js';

export type DrawOp =
  | { op: 'image'; pngB64: string; width: number; height: number }
  | { op: 'outline'; objectId: string; bbox: [number, number, number, number]; color: string }
  | { op: 'label'; objectId: string; text: string; x: number; y: number }
  | { op: 'crosshair'; x: number; y: number; color: string }
  | { op: 'buttons'; objectId: string; options: string[] }
  | { op: 'banner'; text: string }
  | { op: 'toast'; text: string };

export function buildDrawOps(
  state: ConsoleState,
  view: ViewPayload | null,
  palette: SeverityPalette,
): DrawOp[] {
  const ops: DrawOp[] = [];

  if (view !== null) {
    ops.push({ op: 'image', pngB64: view.image_png_b64, width: view.width, height: view.height });
    for (const overlay of view.objects) {
      if (!overlay.visible || overlay.bbox === null) {
        continue;
      }
      const tint = overlay.color ?? palette.outline(overlay.highlight);
      if (tint === null) {
        continue; // normal state objects carry no outline
      }
      ops.push({
        op: 'outline',
        objectId: overlay.id,
        bbox: overlay.bbox,
        color: cssColor(tint),
      });
      ops.push({
        op: 'label',
        objectId: overlay.id,
        text: overlay.label,
        x: overlay.bbox[0],
        y: overlay.bbox[1],
      });
    }
    if (state.mode === 'screen_center') {
      ops.push({
        op: 'crosshair',
        x: view.width / 2,
        y: view.height / 2,
        color: CROSSHAIR_COLOR,
      });
    }
  }

  if (state.connection !== 'connected' || state.degradedReason !== null || view === null) {
    ops.push({
      op: 'banner',
      text: state.degradedReason ?? 'connecting to interface server...',
    });
  }

  if (popupButtonsVisible(state) && state.selection !== null) {
    ops.push({
      op: 'buttons',
      objectId: state.selection,
      options: ['Actions', 'Details'],
    });
  }

  if (state.toast !== null) {
    ops.push({ op: 'toast', text: state.toast });
  }
  return ops;
}
