// Browser bootstrap: canvas painting, pointer events, panel DOM.

import { TwinApi } from './api.js';
import { webSocketTransport } from './channel.js';
import { OperatorConsole } from './console.js';
import type { DrawOp } from './render.js';

function serverBase(): string {
  const params = new URLSearchParams(location.search);
  return params.get('server') ?? `${location.protocol}//${location.host}`;
}

function paint(ctx: CanvasRenderingContext2D, ops: DrawOp[], images: Map<string, HTMLImageElement>): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (const op of ops) {
    switch (op.op) {
      case 'image': {
        let img = images.get(op.pngB64);
        if (!img) {
          img = new Image();
          img.src = `data:image/png;base64,${op.pngB64}`;
          images.clear();
          images.set(op.pngB64, img);
        }
        if (img.complete) {
          ctx.drawImage(img, 0, 0);
        }
        break;
      }
      case 'outline': {
        const [x0, y0, x1, y1] = op.bbox;
        ctx.strokeStyle = op.color;
        ctx.lineWidth = 3;
        ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
        break;
      }
      case 'label':
        ctx.fillStyle = 'white';
        ctx.font = '14px sans-serif';
        ctx.fillText(op.text, op.x + 4, op.y - 6);
        break;
      case 'crosshair':
        ctx.strokeStyle = op.color;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(op.x - 10, op.y);
        ctx.lineTo(op.x + 10, op.y);
        ctx.moveTo(op.x, op.y - 10);
        ctx.lineTo(op.x, op.y + 10);
        ctx.stroke();
        break;
      case 'banner':
        ctx.fillStyle = 'rgba(180, 40, 40, 0.9)';
        ctx.fillRect(0, 0, ctx.canvas.width, 28);
        ctx.fillStyle = 'white';
        ctx.font = '14px sans-serif';
        ctx.fillText(op.text, 10, 19);
        break;
      case 'toast':
        ctx.fillStyle = 'rgba(30, 30, 30, 0.85)';
        ctx.fillRect(10, ctx.canvas.height - 40, 320, 28);
        ctx.fillStyle = 'white';
        ctx.font = '13px sans-serif';
        ctx.fillText(op.text, 18, ctx.canvas.height - 21);
        break;
      case 'buttons':
        break; // rendered as DOM buttons below the canvas
    }
  }
}

function syncPanel(consoleApp: OperatorConsole, panel: HTMLElement, api: TwinApi): void {
  panel.innerHTML = '';
  const { state } = consoleApp;
  if (state.selection === null || state.popup === 'none') {
    return;
  }
  const title = document.createElement('div');
  title.textContent = state.selection;
  title.className = 'panel-title';
  panel.appendChild(title);

  for (const name of ['Actions', 'Details'] as const) {
    const button = document.createElement('button');
    button.textContent = name;
    button.onclick = async () => {
      const kind = name.toLowerCase() as 'actions' | 'details';
      await consoleApp.controls.openPanel(kind);
      const body = document.createElement('div');
      body.className = 'panel-body';
      if (kind === 'actions') {
        const options = await api.fetchActions(state.selection!);
        for (const option of options) {
          const row = document.createElement('button');
          row.textContent =
            `${option.actuator_id}: ${option.mode}` +
            (option.requires ? ` (${option.requires})` : '') +
            (option.current ? ' *' : '');
          row.disabled = option.mode === 'auto'; // auto needs a condition/period editor
          row.onclick = () =>
            consoleApp.controls.sendActuatorCommand(option.actuator_id, option.mode);
          body.appendChild(row);
        }
      } else {
        const details = await api.fetchDetails(state.selection!);
        const pre = document.createElement('pre');
        pre.textContent = JSON.stringify(details.values, null, 2);
        body.appendChild(pre);
      }
      panel.appendChild(body);
    };
    panel.appendChild(button);
  }
}

function bootstrap(): void {
  const canvas = document.getElementById('view') as HTMLCanvasElement;
  const panel = document.getElementById('panel') as HTMLElement;
  const ctx = canvas.getContext('2d')!;
  const base = serverBase();
  const wsUrl = base.replace(/^http/, 'ws') + '/v1/channel';
  const api = new TwinApi(base, (url) => fetch(url, { headers: { accept: 'application/json' } }));
  const touch = navigator.maxTouchPoints > 0;
  const consoleApp = new OperatorConsole(webSocketTransport(wsUrl), api, touch ? 'touch' : 'screen_center');
  consoleApp.state.pose = { ...consoleApp.state.pose, viewport: [canvas.width, canvas.height] };

  const images = new Map<string, HTMLImageElement>();
  const repaint = () => {
    paint(ctx, consoleApp.render(), images);
    syncPanel(consoleApp, panel, api);
  };
  consoleApp.onChange = repaint;
  setInterval(() => consoleApp.refreshView(), 250);

  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  let moved = 0;
  canvas.addEventListener('pointerdown', (event) => {
    dragging = true;
    moved = 0;
    lastX = event.clientX;
    lastY = event.clientY;
  });
  canvas.addEventListener('pointermove', (event) => {
    if (!dragging || !consoleApp.interactionsEnabled) return;
    const dx = event.clientX - lastX;
    const dy = event.clientY - lastY;
    moved += Math.abs(dx) + Math.abs(dy);
    lastX = event.clientX;
    lastY = event.clientY;
    consoleApp.controls.drag(dx, dy);
    repaint();
  });
  canvas.addEventListener('pointerup', (event) => {
    dragging = false;
    if (moved < 4 && consoleApp.interactionsEnabled) {
      const rect = canvas.getBoundingClientRect();
      const u = (event.clientX - rect.left) / rect.width;
      const v = (event.clientY - rect.top) / rect.height;
      const pickPromise =
        consoleApp.state.mode === 'touch'
          ? consoleApp.controls.tap(u, v)
          : consoleApp.controls.click();
      pickPromise.then(repaint);
    }
  });
  canvas.addEventListener('wheel', (event) => {
    event.preventDefault();
    if (consoleApp.interactionsEnabled) {
      consoleApp.controls.zoom(event.deltaY);
      repaint();
    }
  });

  repaint();
}

bootstrap();
