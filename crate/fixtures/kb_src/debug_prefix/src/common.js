'use strict';

function setup(env) {
  function selectColor(namespace) {
    let hash = 0;
    for (let i = 0; i < namespace.length; i++) {
      hash = (hash << 5) - hash + namespace.charCodeAt(i);
      hash |= 0;
    }
    return env.colors[Math.abs(hash) % env.colors.length];
  }
  return selectColor;
}

module.exports = setup;
