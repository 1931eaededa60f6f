// REST reads against the interface server; fetch is injectable for tests.

import type { ActionOption, ViewPayload, ViewPose } from './types.js';

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<any>;
}>;

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

export class TwinApi {
  constructor(private baseUrl: string, private fetchFn: FetchLike) {}

  private async get(path: string): Promise<any> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    const payload = await response.json();
    if (!response.ok) {
      const error = payload?.error ?? {};
      throw new ApiError(response.status, error.code ?? 'Unknown', error.message ?? '');
    }
    return payload;
  }

  fetchView(pose: ViewPose): Promise<ViewPayload> {
    const [w, h] = pose.viewport;
    const query = `yaw=${pose.yaw}&pitch=${pose.pitch}&vfov=${pose.vfov}&w=${w}&h=${h}`;
    return this.get(`/v1/view?${query}`);
  }

  async fetchActions(objectId: string): Promise<ActionOption[]> {
    const payload = await this.get(`/v1/objects/${objectId}/actions`);
    return payload.actions;
  }

  fetchDetails(objectId: string): Promise<any> {
    return this.get(`/v1/objects/${objectId}/details`);
  }
}
