// Wires channel + api + state + interaction into one operator console.

import type { TwinApi } from './api.js';
import { ApiError } from './api.js';
import type { Transport } from './channel.js';
import { ChannelClient } from './channel.js';
import { SeverityPalette } from './colors.js';
import { InteractionController } from './interact.js';
import type { DrawOp } from './render.js';
import { buildDrawOps } from './render.js';
import type { ConsoleState, InteractionMode } from './state.js';
import { applySnapshot, initialState } from './state.js';
import type { Snapshot, ViewPayload } from './types.js';

export class OperatorConsole {
  readonly state: ConsoleState;
  readonly channel: ChannelClient;
  readonly controls: InteractionController;
  palette = new SeverityPalette();
  private view: ViewPayload | null = null;
  private lastPanoramaVersion = -1;
  private lastPoseKey = '';
  onChange: (() => void) | null = null;

  constructor(transport: Transport, private api: TwinApi, mode: InteractionMode = 'screen_center') {
    this.state = initialState(mode);
    this.channel = new ChannelClient(transport, {
      hello: (body) => {
        this.state.sessionId = body.session_id;
        this.state.connection = 'connected';
        if (body.severity_colors) {
          this.palette = new SeverityPalette(body.severity_colors);
        }
        this.notify();
      },
      snapshot: (body) => {
        applySnapshot(this.state, body as Snapshot);
        this.notify();
      },
      closed: () => {
        this.state.connection = 'disconnected';
        this.state.degradedReason = 'connection lost; interactions disabled';
        this.notify();
      },
    });
    this.controls = new InteractionController(this.state, this.channel);
  }

  get interactionsEnabled(): boolean {
    return this.state.connection === 'connected';
  }

  /** Refetch the rendered view when the pose or the panorama changed. */
  async refreshView(): Promise<void> {
    const poseKey = JSON.stringify(this.state.pose);
    const version = this.state.lastSnapshot?.panorama_version ?? this.lastPanoramaVersion;
    if (this.view !== null && poseKey === this.lastPoseKey && version === this.lastPanoramaVersion) {
      return;
    }
    try {
      this.view = await this.api.fetchView(this.state.pose);
      this.state.degradedReason = null;
      this.lastPoseKey = poseKey;
      this.lastPanoramaVersion = version;
    } catch (error) {
      if (error instanceof ApiError) {
        this.state.degradedReason =
          error.code === 'UncoveredRegion'
            ? 'view not covered by the camera sweep yet'
            : `view unavailable: ${error.code}`;
      } else {
        this.state.degradedReason = 'view unavailable';
      }
    }
    this.notify();
  }

  render(): DrawOp[] {
    return buildDrawOps(this.state, this.view, this.palette);
  }

  private notify(): void {
    this.onChange?.();
  }
}
