// Input handling: drags and pinches stay device-local; picks, popups and
// actuator commands go to the server as channel commands.

import type { ChannelClient } from './channel.js';
import type { ConsoleState } from './state.js';
import {
  applySelection,
  closePopup,
  openPanel,
  rotatePose,
  zoomPose,
} from './state.js';
import type { Ack } from './types.js';

// degrees of view rotation per pixel dragged; grab-the-world direction
export const DRAG_SENSITIVITY = 0.15;
// vfov degrees per wheel/pinch unit
export const ZOOM_SENSITIVITY = 0.05;

export class InteractionController {
  constructor(private state: ConsoleState, private channel: ChannelClient) {}

  /** Mouse or touch drag: rotates the local view, sends nothing. */
  drag(dxPx: number, dyPx: number): void {
    rotatePose(this.state, -DRAG_SENSITIVITY * dxPx, DRAG_SENSITIVITY * dyPx);
  }

  /** Wheel or pinch: zooms the local view, sends nothing. */
  zoom(delta: number): void {
    zoomPose(this.state, ZOOM_SENSITIVITY * delta);
  }

  /** Click (screen-center mode) picks whatever the crosshair covers. */
  click(): Promise<Ack> {
    return this.pick(0.5, 0.5);
  }

  /** Tap (touch mode) picks at the touched point. */
  tap(u: number, v: number): Promise<Ack> {
    return this.pick(u, v);
  }

  private async pick(u: number, v: number): Promise<Ack> {
    const point = this.state.mode === 'screen_center' ? [0.5, 0.5] : [u, v];
    const ack = await this.channel.command({
      stream: 'interface',
      action: 'pick',
      point,
      pose: { ...this.state.pose },
    });
    if (ack.status === 'ok') {
      applySelection(this.state, ack.result?.picked ?? null);
    }
    return ack;
  }

  /** Open the [Actions] or [Details] panel for the current selection. */
  async openPanel(panel: 'actions' | 'details'): Promise<Ack> {
    if (this.state.selection === null) {
      throw new Error('nothing selected');
    }
    const ack = await this.channel.command({
      stream: 'interface',
      action: 'popup_open',
      object_id: this.state.selection,
      panel,
    });
    if (ack.status === 'ok') {
      openPanel(this.state, panel);
    }
    return ack;
  }

  async closePopup(): Promise<Ack> {
    const ack = await this.channel.command({ stream: 'interface', action: 'popup_close' });
    if (ack.status === 'ok') {
      closePopup(this.state);
    }
    return ack;
  }

  /** Issue an actuator command from the [Actions] panel. */
  async sendActuatorCommand(
    actuatorId: string,
    mode: 'on' | 'off' | 'auto',
    extras: { condition?: object; period?: object } = {},
  ): Promise<Ack> {
    const ack = await this.channel.command({
      stream: 'iot',
      action: 'actuator',
      directive: { actuator_id: actuatorId, mode, ...extras },
    });
    this.state.toast =
      ack.status === 'ok'
        ? `${actuatorId} -> ${ack.result?.applied_mode}`
        : `${actuatorId} failed: ${ack.error?.code}`;
    return ack;
  }
}
