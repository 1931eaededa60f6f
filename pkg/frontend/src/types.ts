// Wire types mirrored from the interface server (docs/protocol.md).

export interface ViewPose {
  yaw: number;
  pitch: number;
  vfov: number;
  viewport: [number, number];
}

export type HighlightMode = 'normal' | 'active' | 'issue';
export type SeverityLevel = 'none' | 'warning' | 'critical';

export interface SnapshotObject {
  id: string;
  label: string;
  highlight: { mode: HighlightMode; severity?: SeverityLevel };
  severity: { level: SeverityLevel; color: [number, number, number] };
  values: Record<string, number>;
  unavailable_kinds: string[];
}

export interface Snapshot {
  timestamp: number;
  gap: boolean;
  panorama_version: number;
  objects: SnapshotObject[];
  actuators: { id: string; mode: string; active: boolean }[];
}

export interface ChannelMessage {
  type: 'hello' | 'ack' | 'snapshot' | 'error';
  seq: number;
  body: any;
}

export type CommandStream = 'iot' | 'interface';

export interface CommandBody {
  stream: CommandStream;
  action: string;
  [key: string]: unknown;
}

export interface Ack {
  command_seq: number;
  status: 'ok' | 'error';
  origin: string | null;
  result?: any;
  error?: { code: string; message: string; origin?: string };
}

export interface OverlayCorner {
  x: number;
  y: number;
  in_front: boolean;
}

export interface ViewObjectOverlay {
  id: string;
  label: string;
  visible: boolean;
  corners: OverlayCorner[];
  bbox: [number, number, number, number] | null;
  highlight: { mode: HighlightMode; severity?: SeverityLevel };
  color: [number, number, number] | null;
}

export interface ViewPayload {
  pose: ViewPose;
  panorama_version: number;
  width: number;
  height: number;
  image_png_b64: string;
  objects: ViewObjectOverlay[];
}

export interface ActionOption {
  actuator_id: string;
  kind: string;
  mode: 'on' | 'off' | 'auto';
  requires?: 'condition' | 'period';
  current: boolean;
}
