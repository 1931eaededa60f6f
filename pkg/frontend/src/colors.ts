import type { SeverityLevel } from './types.js';

export type Rgb = [number, number, number];

// Defaults match the server; the hello message may override them.
export const DEFAULT_SEVERITY_COLORS: Record<SeverityLevel, Rgb> = {
  none: [0, 170, 0],
  warning: [255, 170, 0],
  critical: [220, 0, 0],
};

export const ACTIVE_OUTLINE: Rgb = [80, 160, 255];
export const CROSSHAIR_COLOR = 'rgba(255, 255, 255, 0.85)';

export function cssColor(rgb: Rgb, alpha = 1.0): string {
  return `rgba(${rgb[0]}, ${rgb[1]}, ${rgb[2]}, ${alpha})`;
}

export class SeverityPalette {
  private colors: Record<SeverityLevel, Rgb>;

  constructor(colors?: Partial<Record<SeverityLevel, Rgb>>) {
    this.colors = { ...DEFAULT_SEVERITY_COLORS, ...(colors ?? {}) };
  }

  color(level: SeverityLevel): Rgb {
    return this.colors[level];
  }

  /** Outline tint for an object: issue -> severity color, active -> accent. */
  outline(highlight: { mode: string; severity?: SeverityLevel }): Rgb | null {
    if (highlight.mode === 'issue' && highlight.severity) {
      return this.colors[highlight.severity];
    }
    if (highlight.mode === 'active') {
      return ACTIVE_OUTLINE;
    }
    return null;
  }
}
