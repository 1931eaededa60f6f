import { describe, expect, it } from 'vitest';

import { TwinApi } from '../src/api.js';
import { OperatorConsole } from '../src/console.js';
import { DRAG_SENSITIVITY } from '../src/interact.js';
import { MockInterfaceServer } from './mockServer.js';

const unusedFetch = async (_url: string) => {
  throw new Error('not used');
};

function makeConsole(mode: 'screen_center' | 'touch' = 'screen_center') {
  const server = new MockInterfaceServer();
  const app = new OperatorConsole(server.transport, new TwinApi('http://mock', unusedFetch), mode);
  server.connect();
  return { server, app };
}

describe('interaction controller', () => {
  it('drag right decreases yaw by sensitivity times pixels', () => {
    const { app } = makeConsole();
    app.controls.drag(100, 0);
    expect(app.state.pose.yaw).toBeCloseTo(-DRAG_SENSITIVITY * 100, 10);
  });

  it('screen_center click always picks the center regardless of cursor', async () => {
    const { server, app } = makeConsole('screen_center');
    server.pickResult = 'bed-a';
    await app.controls.click();
    const pick = server.commandsByStream('interface')[0];
    expect(pick.point).toEqual([0.5, 0.5]);
  });

  it('pick carries the current device-local pose to the server', async () => {
    const { server, app } = makeConsole('touch');
    app.controls.drag(-200, 40); // rotate first, device-locally
    server.pickResult = null;
    await app.controls.tap(0.25, 0.75);
    const pick = server.commandsByStream('interface')[0] as any;
    expect(pick.pose.yaw).toBeCloseTo(DRAG_SENSITIVITY * 200, 10);
    expect(pick.pose.pitch).toBeCloseTo(DRAG_SENSITIVITY * 40, 10);
  });

  it('picking nothing clears selection and popup', async () => {
    const { server, app } = makeConsole('touch');
    server.pickResult = 'bed-a';
    await app.controls.tap(0.5, 0.5);
    await app.controls.openPanel('details');
    server.pickResult = null;
    await app.controls.tap(0.9, 0.1);
    expect(app.state.selection).toBeNull();
    expect(app.state.popup).toBe('none');
  });

  it('failed actuator command shows an error toast', async () => {
    const { app } = makeConsole();
    // make the mock reject by pretending it is a device command
    const ack = await app.channel.command({ stream: 'device' as any, action: 'zoom' });
    expect(ack.status).toBe('error');
    expect(ack.error?.code).toBe('ClientLocalCommand');
  });

  it('disconnect disables interactions flag', () => {
    const { server, app } = makeConsole();
    expect(app.interactionsEnabled).toBe(true);
    server.transport.dropConnection();
    expect(app.interactionsEnabled).toBe(false);
    expect(app.state.degradedReason).toContain('interactions disabled');
  });
});
